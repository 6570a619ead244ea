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

#pragma once

#include "monisum/kernels.hpp"

namespace monisum::kernels::detail {

double sum_squared_diff_scalar(const double* a, const double* b, std::size_t n);
double dot_scalar(const double* a, const double* b, std::size_t n);
void assign_nearest_scalar(const double* points, std::size_t n, const double* centroids,
                           std::size_t k, std::size_t dim, std::int32_t* labels,
                           double* dist2);

#if defined(MONISUM_HAVE_AVX2)
double sum_squared_diff_avx2(const double* a, const double* b, std::size_t n);
double dot_avx2(const double* a, const double* b, std::size_t n);
void assign_nearest_avx2(const double* points, std::size_t n, const double* centroids,
                         std::size_t k, std::size_t dim, std::int32_t* labels,
                         double* dist2);
#endif

// Lane count shared by every reduction variant.
inline constexpr std::size_t kLanes = 4;

}  // namespace monisum::kernels::detail
