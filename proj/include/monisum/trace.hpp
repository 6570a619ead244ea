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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace monisum {

/// Raised for malformed or out-of-range trace input. Carries the 1-based
/// line number of the offending CSV row when there is one (0 otherwise).
class TraceError : public std::runtime_error {
 public:
  TraceError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Per-node utilization series on a dense (step, node, resource) grid.
/// Values are normalized to [0, 1].
struct TraceDataset {
  std::size_t n_nodes = 0;
  std::size_t n_steps = 0;
  std::size_t n_resources = 0;
  double step_seconds = 1.0;
  std::vector<std::string> resource_names;
  std::vector<std::string> node_ids;
  std::vector<double> values;  // [step][node][resource]

  double at(std::size_t t, std::size_t node, std::size_t r) const {
    return values[(t * n_nodes + node) * n_resources + r];
  }
  double& at(std::size_t t, std::size_t node, std::size_t r) {
    return values[(t * n_nodes + node) * n_resources + r];
  }
  /// All nodes' measurements at step t, node-major (N x d).
  std::span<const double> step(std::size_t t) const {
    return {values.data() + t * n_nodes * n_resources, n_nodes * n_resources};
  }
  /// One node's series of one resource.
  std::vector<double> series(std::size_t node, std::size_t r) const;

  /// Throws TraceError if shapes disagree or a value is outside [0, 1].
  void validate() const;

  bool operator==(const TraceDataset&) const = default;
};

enum class Normalization { kNone, kMax };

struct CsvSchema {
  std::string time_column = "t";
  std::string node_column = "node";
  std::vector<std::string> resource_columns;  // empty: every other column
  Normalization normalization = Normalization::kNone;
  bool clamp = true;
  double step_seconds = 1.0;  // used when the trace has a single step
};

TraceDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
TraceDataset parse_csv(std::istream& in, const CsvSchema& schema = {});

/// Divides each resource by its maximum over all (step, node) cells.
/// Resources whose maximum is zero are left untouched.
void normalize_by_max(TraceDataset& dataset);

struct CsvWriteOptions {
  int significant_digits = 9;  // 17 round-trips any double exactly
};

void write_csv(const TraceDataset& dataset, const std::filesystem::path& path,
               const CsvWriteOptions& options = {});
void write_csv(const TraceDataset& dataset, std::ostream& out,
               const CsvWriteOptions& options = {});

/// Latent-group trace generator. Each group g follows
///   level_g + amplitude*sin(2*pi*t/period_g + phase_g) + walk_g(t) + jump_g(t)
/// where the walk is a reflected random walk in [-walk_bound, walk_bound] and
/// jump_g is a piecewise-constant offset redrawn uniformly in
/// [-jump_size, jump_size] with probability jump_probability per step.
/// Levels are spread evenly, level_g = (g + 0.5) / G, and the default shape
/// terms scale with 1/G so that groups never overlap without noise or jumps.
struct SyntheticSpec {
  std::size_t n_nodes = 50;
  std::size_t n_steps = 10000;
  std::size_t n_resources = 1;
  std::size_t n_groups = 3;
  double switch_probability = 0.0;
  double noise_std = 0.01;
  std::uint64_t seed = 1;

  // Shape terms; negative means "use the 1/G-scaled default".
  double amplitude = -1.0;        // default 0.2 / G
  double walk_step = -1.0;        // default 0.002 / G
  double walk_bound = -1.0;       // default 0.1 / G
  double jump_probability = 0.0;
  double jump_size = -1.0;        // default 0.25 / G
  double base_period = 100.0;     // period_g = base_period * (1 + g / 2)
  double step_seconds = 300.0;
};

struct SyntheticTrace {
  TraceDataset dataset;
  std::vector<std::int32_t> groups;  // [step][node] latent group
  std::int32_t group(std::size_t t, std::size_t node) const {
    return groups[t * dataset.n_nodes + node];
  }
};

SyntheticTrace generate_synthetic(const SyntheticSpec& spec);

}  // namespace monisum
