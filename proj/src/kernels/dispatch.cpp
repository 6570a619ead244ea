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

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace monisum::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::kScalar, detail::sum_squared_diff_scalar,
                                 detail::dot_scalar, detail::assign_nearest_scalar};
  return table;
}

const KernelTable* avx2_table() {
#if defined(MONISUM_HAVE_AVX2)
  static const KernelTable table{Isa::kAvx2, detail::sum_squared_diff_avx2, detail::dot_avx2,
                                 detail::assign_nearest_avx2};
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* forced = std::getenv("MONISUM_SIMD");
    if (forced != nullptr && std::string(forced) == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return table;
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("sum_squared_diff: length mismatch");
  return active().sum_squared_diff(a.data(), b.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  return active().dot(a.data(), b.data(), a.size());
}

void assign_nearest(const Matrix& points, const Matrix& centroids,
                    std::span<std::int32_t> labels, std::span<double> dist2) {
  if (points.cols() != centroids.cols()) {
    throw std::invalid_argument("assign_nearest: dimension mismatch");
  }
  if (centroids.rows() == 0) throw std::invalid_argument("assign_nearest: no centroids");
  if (labels.size() != points.rows() || dist2.size() != points.rows()) {
    throw std::invalid_argument("assign_nearest: output size mismatch");
  }
  active().assign_nearest(points.values().data(), points.rows(), centroids.values().data(),
                          centroids.rows(), points.cols(), labels.data(), dist2.data());
}

}  // namespace monisum::kernels
