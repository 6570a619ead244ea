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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "monisum/clustering.hpp"
#include "monisum/matrix.hpp"
#include "monisum/trace.hpp"

namespace monisum::evaluation {

struct MetricsRecord {
  std::int64_t t = 0;
  std::size_t h = 0;
  std::string resource;
  double rmse = 0.0;
};

/// sqrt((1/N) sum_i ||forecast_i - truth_i||^2) over N rows.
double rmse(const Matrix& forecast, const Matrix& truth);

/// sqrt of the mean of squared per-step RMSEs.
double time_avg_rmse(std::span<const double> per_step);

/// sqrt((1/(H+1)) sum_{h=0..H} avg_h^2). Every horizon 0..H must be present.
double objective(const std::map<std::size_t, double>& time_avg_by_h, std::size_t max_h);

/// Time-averaged RMSE between each node's stored value and its assigned
/// centroid; stored[s] and centroids-of partitions[s] share a space.
double intermediate_rmse(std::span<const Matrix> stored,
                         std::span<const clustering::Partition> partitions);

/// Per-step intermediate RMSE.
double intermediate_rmse_step(const Matrix& stored, std::span<const std::int32_t> labels,
                              const Matrix& centroids);

enum class StdMode {
  kPooled,   // std of every (node, step) value together
  kPerNode,  // root mean of each node's own variance
};

/// Population-convention standard deviation of one resource.
double std_baseline(const TraceDataset& dataset, std::size_t resource,
                    StdMode mode = StdMode::kPooled);

/// Population Pearson correlation. Throws if either series is constant.
double pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationCdf {
  std::vector<double> values;  // ascending
  std::vector<double> cdf;     // (i + 1) / n
  std::size_t excluded_constant = 0;
};

/// Pairwise correlations of all non-constant node series of one resource.
CorrelationCdf correlation_cdf(const TraceDataset& dataset, std::size_t resource);

/// Adjusted Rand index between two labelings of the same items.
double adjusted_rand_index(std::span<const std::int32_t> a, std::span<const std::int32_t> b);

}  // namespace monisum::evaluation
