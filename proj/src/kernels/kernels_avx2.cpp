// Copyright 2026 The Monisum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <immintrin.h>

#include <limits>

#include "kernels_internal.hpp"

namespace monisum::kernels::detail {

namespace {

double reduce_lanes(__m256d v) {
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace

double sum_squared_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t body = n - n % kLanes;
  for (std::size_t i = 0; i < body; i += kLanes) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double total = reduce_lanes(acc);
  for (std::size_t i = body; i < n; ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t body = n - n % kLanes;
  for (std::size_t i = 0; i < body; i += kLanes) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double total = reduce_lanes(acc);
  for (std::size_t i = body; i < n; ++i) total += a[i] * b[i];
  return total;
}

// Four points per iteration, one per lane. Per-point distances accumulate
// over dimensions in the same order as the scalar loop.
void assign_nearest_avx2(const double* points, std::size_t n, const double* centroids,
                         std::size_t k, std::size_t dim, std::int32_t* labels,
                         double* dist2) {
  const std::size_t body = n - n % kLanes;
  const auto stride = static_cast<long long>(dim);
  const __m256i offsets = _mm256_set_epi64x(3 * stride, 2 * stride, stride, 0);
  for (std::size_t i = 0; i < body; i += kLanes) {
    const double* base = points + i * dim;
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d best_k = _mm256_setzero_pd();
    for (std::size_t c = 0; c < k; ++c) {
      const double* q = centroids + c * dim;
      __m256d d = _mm256_setzero_pd();
      for (std::size_t j = 0; j < dim; ++j) {
        const __m256d p = dim == 1 ? _mm256_loadu_pd(base)
                                   : _mm256_i64gather_pd(base + j, offsets, 8);
        const __m256d diff = _mm256_sub_pd(p, _mm256_set1_pd(q[j]));
        d = _mm256_add_pd(d, _mm256_mul_pd(diff, diff));
      }
      const __m256d closer = _mm256_cmp_pd(d, best, _CMP_LT_OQ);
      best = _mm256_blendv_pd(best, d, closer);
      best_k = _mm256_blendv_pd(best_k, _mm256_set1_pd(static_cast<double>(c)), closer);
    }
    alignas(32) double out_d[kLanes];
    alignas(32) double out_k[kLanes];
    _mm256_store_pd(out_d, best);
    _mm256_store_pd(out_k, best_k);
    for (std::size_t l = 0; l < kLanes; ++l) {
      dist2[i + l] = out_d[l];
      labels[i + l] = static_cast<std::int32_t>(out_k[l]);
    }
  }
  if (body < n) {
    assign_nearest_scalar(points + body * dim, n - body, centroids, k, dim, labels + body,
                          dist2 + body);
  }
}

}  // namespace monisum::kernels::detail
