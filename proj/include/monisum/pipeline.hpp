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
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monisum/clustering.hpp"
#include "monisum/config.hpp"
#include "monisum/evaluation.hpp"
#include "monisum/forecasting.hpp"
#include "monisum/trace.hpp"
#include "monisum/transmission.hpp"

namespace monisum::pipeline {

/// The controller's copy of every node's latest transmitted measurement.
struct StoredView {
  Matrix values;                   // N x d
  std::vector<std::int64_t> age;   // steps since the node last transmitted
};

/// Resource indices clustered together: one group per resource in scalar
/// mode, a single group with all resources in joint mode.
std::vector<std::vector<std::size_t>> resource_groups(FeatureMode mode, std::size_t n_resources);

/// Clustering and forecasting for one resource group. Consumes the stored
/// view one step at a time and never sees true measurements.
class ClusterPipeline {
 public:
  ClusterPipeline(const ExperimentConfig& config, std::size_t pipeline_index,
                  std::vector<std::size_t> resources, std::size_t n_nodes,
                  std::vector<std::int32_t> static_assignment = {});
  ClusterPipeline(ClusterPipeline&&) noexcept = default;

  struct Output {
    const clustering::Partition* partition = nullptr;
    const forecasting::Snapshot* snapshot = nullptr;
    std::vector<forecasting::ForecastRecord> forecasts;  // one per horizon >= 1
  };

  Output step(std::int64_t t, const StoredView& view);

  const std::vector<std::size_t>& resources() const { return resources_; }
  const clustering::PartitionHistory& history() const { return history_; }
  const forecasting::SnapshotWindow& snapshots() const { return snapshots_; }
  const forecasting::ForecastBank& bank() const { return bank_; }

 private:
  Matrix features(const Matrix& values) const;

  ExperimentConfig config_;
  std::size_t index_;
  std::vector<std::size_t> resources_;
  std::size_t n_nodes_;
  std::vector<std::int32_t> static_assignment_;
  std::vector<std::size_t> forecast_horizons_;
  std::deque<Matrix> recent_values_;  // newest first, up to `window`
  clustering::PartitionHistory history_;
  forecasting::SnapshotWindow snapshots_;
  forecasting::ForecastBank bank_;
};

/// Step-driven simulation: node agents decide transmissions from their own
/// current measurement, then each resource group clusters and forecasts on
/// the stored view.
class OnlineSimulator {
 public:
  /// static_assignments, when given, holds one fixed assignment per resource
  /// group (offline static-clustering baseline).
  OnlineSimulator(const ExperimentConfig& config, std::size_t n_nodes, std::size_t n_resources,
                  std::vector<std::vector<std::int32_t>> static_assignments = {});

  struct StepResult {
    std::int64_t t = 0;
    std::vector<std::uint8_t> transmitted;
    std::vector<ClusterPipeline::Output> pipelines;
  };

  /// measurements: this step's N x d true values, node-major.
  StepResult step(std::span<const double> measurements);

  std::int64_t steps_done() const { return t_; }
  const StoredView& view() const { return view_; }
  const std::vector<transmission::Transmitter>& transmitters() const { return agents_; }
  const std::vector<ClusterPipeline>& pipelines() const { return pipelines_; }

 private:
  ExperimentConfig config_;
  std::size_t n_nodes_;
  std::size_t n_resources_;
  std::vector<transmission::Transmitter> agents_;
  std::vector<ClusterPipeline> pipelines_;
  StoredView view_;
  std::int64_t t_ = 0;
};

struct AggregateRow {
  std::size_t h = 0;
  std::string resource;
  double time_avg_rmse = 0.0;
  double objective_contrib = 0.0;  // time_avg^2 / (H + 1) for h <= H, else 0
  std::size_t steps = 0;
};

struct AssignmentRow {
  std::int64_t t;
  std::size_t node;
  std::string resource;
  std::int32_t label;
};

struct ForecastRow {
  std::int64_t t;
  std::size_t h;
  std::size_t node;
  std::string resource;
  double forecast;
  double truth;
};

/// Everything one run produces.
struct RunResult {
  std::int64_t n_steps = 0;
  std::vector<evaluation::MetricsRecord> metrics;
  std::vector<AggregateRow> aggregates;
  std::map<std::string, double> objective;          // per resource
  std::map<std::string, double> intermediate_rmse;  // per resource
  std::map<std::string, double> std_baseline;       // per resource
  std::vector<std::int64_t> sent_counts;
  std::vector<double> frequencies;
  std::vector<double> budget_slack;  // frequency - budget
  std::size_t ar_fallbacks = 0;
  bool offline = false;
  std::vector<AssignmentRow> assignments;
  std::vector<ForecastRow> forecasts;

  double time_avg(std::size_t h, const std::string& resource) const;
  double mean_frequency() const;
};

RunResult run(const ExperimentConfig& config, const TraceDataset& dataset);

/// Writes manifest, metrics.csv, aggregate.csv, frequencies.csv and the
/// optional dumps into dir (created if needed).
void write_outputs(const RunResult& result, const ExperimentConfig& config,
                   const TraceDataset& dataset, const std::filesystem::path& dir);

std::string version_string();

// ---------------------------------------------------------------------------

struct MonitorResult {
  std::map<std::string, double> rmse;                  // per resource, test phase
  std::vector<std::vector<std::int32_t>> monitors;     // per resource group
  std::vector<std::vector<std::int32_t>> assignment;   // per resource group
};

/// Train/test protocol: full data for train_len steps picks one monitor per
/// cluster; over the next test_len steps every node is estimated by its
/// cluster's monitor. config.clustering selects K-means monitors (dynamic)
/// or random ones (min-distance).
MonitorResult monitor_mode(const ExperimentConfig& config, const TraceDataset& dataset,
                           std::size_t train_len, std::size_t test_len);

// ---------------------------------------------------------------------------

enum class SweepAxis { kBudget, kK, kHorizon, kM, kMPrime };

SweepAxis parse_axis(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepRow {
  std::string axis;
  double value = 0.0;
  std::size_t h = 0;
  std::string resource;
  double time_avg_rmse = 0.0;
  double objective = 0.0;
  double intermediate_rmse = 0.0;
  double mean_frequency = 0.0;
};

/// One run per value (shared seed), parallel up to thread_cap().
std::vector<SweepRow> sweep(const ExperimentConfig& base, SweepAxis axis,
                            std::span<const double> values, const TraceDataset& dataset);

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path);

}  // namespace monisum::pipeline
