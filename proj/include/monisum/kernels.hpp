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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "monisum/matrix.hpp"

/// Data-parallel inner loops. Every kernel has a scalar reference and, where
/// the target supports it, an AVX2 variant picked at runtime. Variants are
/// required to be bit-identical: reductions use a fixed four-lane striping
/// that the scalar reference reproduces, and nearest-centroid search
/// vectorizes across points so each distance is accumulated in the same
/// order as the scalar loop.
namespace monisum::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i (a_i - b_i)^2
  double (*sum_squared_diff)(const double* a, const double* b, std::size_t n);
  // sum_i a_i * b_i
  double (*dot)(const double* a, const double* b, std::size_t n);
  // For each of n points (row-major, dim columns) writes the index of the
  // nearest of k centroids (ties to the lowest index) and the squared
  // distance to it.
  void (*assign_nearest)(const double* points, std::size_t n, const double* centroids,
                         std::size_t k, std::size_t dim, std::int32_t* labels,
                         double* dist2);
};

const KernelTable& scalar_table();

/// nullptr when the variant is not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_table();

/// Best table for this machine. MONISUM_SIMD=scalar forces the reference.
const KernelTable& active();

double sum_squared_diff(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);
void assign_nearest(const Matrix& points, const Matrix& centroids,
                    std::span<std::int32_t> labels, std::span<double> dist2);

}  // namespace monisum::kernels
