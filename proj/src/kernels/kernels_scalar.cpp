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

#include <limits>

#include "kernels_internal.hpp"

namespace monisum::kernels::detail {

double sum_squared_diff_scalar(const double* a, const double* b, std::size_t n) {
  double acc[kLanes] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t body = n - n % kLanes;
  for (std::size_t i = 0; i < body; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      const double d = a[i + l] - b[i + l];
      acc[l] += d * d;
    }
  }
  double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (std::size_t i = body; i < n; ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc[kLanes] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t body = n - n % kLanes;
  for (std::size_t i = 0; i < body; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] += a[i + l] * b[i + l];
  }
  double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (std::size_t i = body; i < n; ++i) total += a[i] * b[i];
  return total;
}

void assign_nearest_scalar(const double* points, std::size_t n, const double* centroids,
                           std::size_t k, std::size_t dim, std::int32_t* labels,
                           double* dist2) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = points + i * dim;
    double best = std::numeric_limits<double>::infinity();
    std::int32_t best_k = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const double* q = centroids + c * dim;
      double d = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double diff = p[j] - q[j];
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        best_k = static_cast<std::int32_t>(c);
      }
    }
    labels[i] = best_k;
    dist2[i] = best;
  }
}

}  // namespace monisum::kernels::detail
