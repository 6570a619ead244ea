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

#include <cmath>
#include <limits>
#include <stdexcept>

#include "monisum/kernels.hpp"
#include "monisum/pipeline.hpp"
#include "monisum/rng.hpp"

namespace monisum::pipeline {

namespace {

Matrix training_features(const TraceDataset& dataset, std::span<const std::size_t> resources,
                         std::size_t train_len) {
  Matrix f(dataset.n_nodes, train_len * resources.size());
  for (std::size_t i = 0; i < dataset.n_nodes; ++i) {
    auto row = f.row(i);
    std::size_t c = 0;
    for (std::size_t t = 0; t < train_len; ++t) {
      for (std::size_t r : resources) row[c++] = dataset.at(t, i, r);
    }
  }
  return f;
}

// Member of cluster j closest to its centroid; ties to the lowest node index.
std::vector<std::int32_t> kmeans_monitors(const Matrix& features, const clustering::Partition& p) {
  std::vector<std::int32_t> monitors(p.k, -1);
  std::vector<double> best(p.k, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const auto j = static_cast<std::size_t>(p.assignment[i]);
    const double d2 = kernels::sum_squared_diff(features.row(i), p.centroids.row(j));
    if (d2 < best[j]) {
      best[j] = d2;
      monitors[j] = static_cast<std::int32_t>(i);
    }
  }
  return monitors;
}

}  // namespace

MonitorResult monitor_mode(const ExperimentConfig& config, const TraceDataset& dataset,
                           std::size_t train_len, std::size_t test_len) {
  config.validate();
  dataset.validate();
  if (train_len == 0 || test_len == 0) throw std::invalid_argument("monitor: empty phase");
  if (train_len + test_len > dataset.n_steps) {
    throw std::invalid_argument("monitor: train + test (" + std::to_string(train_len + test_len) +
                                ") exceeds trace length " + std::to_string(dataset.n_steps));
  }
  if (config.k > dataset.n_nodes) throw std::invalid_argument("k exceeds the number of nodes");
  if (config.clustering == ClusteringKind::kStatic) {
    throw std::invalid_argument("monitor mode supports dynamic or min-distance clustering");
  }

  const std::size_t N = dataset.n_nodes;
  MonitorResult result;
  std::vector<std::vector<double>> per_step(dataset.n_resources);
  const auto groups = resource_groups(config.clustering_mode, dataset.n_resources);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Matrix feats = training_features(dataset, groups[g], train_len);
    const std::uint64_t seed = derive_seed(config.seed, {0x3017, g});
    std::vector<std::int32_t> monitors;
    std::vector<std::int32_t> assignment;
    if (config.clustering == ClusteringKind::kDynamic) {
      const auto km = clustering::kmeans(feats, config.k, seed);
      monitors = kmeans_monitors(feats, km.partition);
      assignment = km.partition.assignment;
    } else {
      const auto p = clustering::min_distance_baseline(feats, config.k, seed);
      monitors = p.representatives;
      assignment = p.assignment;
    }
    for (std::size_t r : groups[g]) {
      for (std::size_t s = train_len; s < train_len + test_len; ++s) {
        double sse = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
          const auto mon = static_cast<std::size_t>(monitors[static_cast<std::size_t>(assignment[i])]);
          const double diff = dataset.at(s, mon, r) - dataset.at(s, i, r);
          sse += diff * diff;
        }
        per_step[r].push_back(std::sqrt(sse / static_cast<double>(N)));
      }
    }
    result.monitors.push_back(std::move(monitors));
    result.assignment.push_back(std::move(assignment));
  }
  for (std::size_t r = 0; r < dataset.n_resources; ++r) {
    result.rmse[dataset.resource_names[r]] = evaluation::time_avg_rmse(per_step[r]);
  }
  return result;
}

}  // namespace monisum::pipeline
