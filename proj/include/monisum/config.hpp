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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "monisum/clustering.hpp"
#include "monisum/evaluation.hpp"

namespace monisum {

enum class TransmitterKind { kAdaptive, kUniform };
enum class ClusteringKind { kDynamic, kStatic, kMinDistance };
enum class FeatureMode { kScalar, kJoint };

/// Every knob of one experiment. Field names double as config-file keys.
struct ExperimentConfig {
  // transmission
  double budget = 0.3;
  double v0 = 1e-12;
  double gamma = 0.65;
  bool queue_projection = false;
  TransmitterKind transmitter = TransmitterKind::kAdaptive;
  // clustering
  std::size_t k = 3;
  std::size_t m = 1;
  std::size_t window = 1;
  FeatureMode clustering_mode = FeatureMode::kScalar;
  ClusteringKind clustering = ClusteringKind::kDynamic;
  clustering::SimilarityMeasure similarity = clustering::SimilarityMeasure::kIntersection;
  // forecasting
  std::size_t m_prime = 5;
  std::string forecaster = "sample-and-hold";
  std::size_t order = 3;
  std::int64_t w_init = 1000;
  std::int64_t w_retrain = 288;
  // evaluation
  std::vector<std::size_t> horizons = {0, 1, 5, 10};
  std::size_t max_horizon = 10;  // objective averages h = 0..max_horizon
  bool include_warmup = false;
  evaluation::StdMode std_mode = evaluation::StdMode::kPooled;
  bool dump_assignments = false;
  bool dump_forecasts = false;
  // monitor mode
  std::size_t train_len = 500;
  std::size_t test_len = 500;

  std::uint64_t seed = 1;

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;

  /// Sorted union of `horizons` and 0..max_horizon.
  std::vector<std::size_t> evaluated_horizons() const;
};

/// Sets one field from its config-file key and textual value.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// key=value lines; '#' starts a comment. Keys under "run." and "result."
/// (manifest bookkeeping) are ignored so a manifest reloads as a config.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

std::vector<std::pair<std::string, std::string>> to_settings(const ExperimentConfig& config);
void write_config(std::ostream& out, const ExperimentConfig& config);

std::string to_string(TransmitterKind kind);
std::string to_string(ClusteringKind kind);
std::string to_string(FeatureMode mode);
std::string to_string(clustering::SimilarityMeasure measure);
std::string to_string(evaluation::StdMode mode);

/// Thread budget from MONISUM_THREADS (default: hardware concurrency).
std::size_t thread_cap();

}  // namespace monisum
