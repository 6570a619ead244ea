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

#include "monisum/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "monisum/kernels.hpp"
#include "monisum/rng.hpp"

#ifndef MONISUM_VERSION
#define MONISUM_VERSION "0.0.0"
#endif

namespace monisum::pipeline {

std::string version_string() { return std::string("monisum ") + MONISUM_VERSION; }

std::vector<std::vector<std::size_t>> resource_groups(FeatureMode mode, std::size_t n_resources) {
  std::vector<std::vector<std::size_t>> groups;
  if (mode == FeatureMode::kJoint) {
    groups.emplace_back();
    for (std::size_t r = 0; r < n_resources; ++r) groups.back().push_back(r);
  } else {
    for (std::size_t r = 0; r < n_resources; ++r) groups.push_back({r});
  }
  return groups;
}

// ---------------------------------------------------------------------------
// ClusterPipeline

namespace {

std::vector<std::size_t> positive_horizons(const ExperimentConfig& config) {
  std::vector<std::size_t> out;
  for (std::size_t h : config.evaluated_horizons()) {
    if (h >= 1) out.push_back(h);
  }
  return out;
}

}  // namespace

ClusterPipeline::ClusterPipeline(const ExperimentConfig& config, std::size_t pipeline_index,
                                 std::vector<std::size_t> resources, std::size_t n_nodes,
                                 std::vector<std::int32_t> static_assignment)
    : config_(config),
      index_(pipeline_index),
      resources_(std::move(resources)),
      n_nodes_(n_nodes),
      static_assignment_(std::move(static_assignment)),
      forecast_horizons_(positive_horizons(config)),
      history_(std::max(config.m, config.m_prime) + 1),
      snapshots_(config.m_prime + 1),
      bank_(config.forecaster, config.order, config.k, resources_.size(), config.w_init,
            config.w_retrain) {
  if (resources_.empty()) throw std::invalid_argument("pipeline has no resources");
  if (config_.k > n_nodes_) throw std::invalid_argument("k exceeds the number of nodes");
  if (config_.clustering == ClusteringKind::kStatic) {
    if (static_assignment_.size() != n_nodes_) {
      throw std::invalid_argument("static clustering needs an assignment for every node");
    }
    for (std::int32_t label : static_assignment_) {
      if (label < 0 || static_cast<std::size_t>(label) >= config_.k) {
        throw std::invalid_argument("static assignment label out of range");
      }
    }
  }
}

Matrix ClusterPipeline::features(const Matrix& values) const {
  if (config_.window == 1) return values;
  const std::size_t d = values.cols();
  Matrix f(values.rows(), d * config_.window);
  for (std::size_t lag = 0; lag < config_.window; ++lag) {
    // Before `window` steps exist, the oldest stored view repeats.
    const Matrix& src = recent_values_[std::min(lag, recent_values_.size() - 1)];
    for (std::size_t i = 0; i < values.rows(); ++i) {
      for (std::size_t q = 0; q < d; ++q) f(i, lag * d + q) = src(i, q);
    }
  }
  return f;
}

ClusterPipeline::Output ClusterPipeline::step(std::int64_t t, const StoredView& view) {
  const std::size_t d = resources_.size();
  Matrix values(n_nodes_, d);
  for (std::size_t i = 0; i < n_nodes_; ++i) {
    for (std::size_t q = 0; q < d; ++q) values(i, q) = view.values(i, resources_[q]);
  }
  recent_values_.push_front(values);
  if (recent_values_.size() > config_.window) recent_values_.pop_back();
  const Matrix feats = features(values);
  const std::uint64_t seed = derive_seed(config_.seed, {index_, static_cast<std::uint64_t>(t)});

  switch (config_.clustering) {
    case ClusteringKind::kDynamic: {
      clustering::DynamicOptions opts;
      opts.k = config_.k;
      opts.m = config_.m;
      opts.measure = config_.similarity;
      clustering::dynamic_step(feats, history_, opts, seed, t);
      break;
    }
    case ClusteringKind::kStatic: {
      clustering::Partition p;
      p.t = t;
      p.k = config_.k;
      p.assignment = static_assignment_;
      p.centroids = clustering::cluster_means(feats, p.assignment, p.k);
      history_.push(std::move(p));
      break;
    }
    case ClusteringKind::kMinDistance: {
      clustering::Partition raw = clustering::min_distance_baseline(feats, config_.k, seed);
      raw.t = t;
      history_.push(clustering::relabel(raw, history_, config_.m, config_.similarity));
      break;
    }
  }
  const clustering::Partition& partition = history_.back();

  Matrix centroids;
  if (!partition.representatives.empty()) {
    centroids = Matrix(config_.k, d);
    for (std::size_t j = 0; j < config_.k; ++j) {
      const auto src = values.row(static_cast<std::size_t>(partition.representatives[j]));
      std::copy(src.begin(), src.end(), centroids.row(j).begin());
    }
  } else if (config_.window == 1) {
    centroids = partition.centroids;
  } else {
    centroids = clustering::cluster_means(values, partition.assignment, config_.k);
  }
  snapshots_.push({t, std::move(values), centroids});
  bank_.observe(t, centroids);

  Output out;
  out.partition = &partition;
  out.snapshot = &snapshots_.back();
  if (!forecast_horizons_.empty()) {
    out.forecasts = forecasting::forecast_nodes(t, forecast_horizons_, bank_, history_,
                                                snapshots_, config_.m_prime);
  }
  return out;
}

// ---------------------------------------------------------------------------
// OnlineSimulator

OnlineSimulator::OnlineSimulator(const ExperimentConfig& config, std::size_t n_nodes,
                                 std::size_t n_resources,
                                 std::vector<std::vector<std::int32_t>> static_assignments)
    : config_(config), n_nodes_(n_nodes), n_resources_(n_resources) {
  config_.validate();
  if (n_nodes_ == 0 || n_resources_ == 0) throw std::invalid_argument("empty simulation");
  transmission::TransmitterParams params{config_.budget, config_.v0, config_.gamma,
                                         config_.queue_projection};
  const bool uniform = config_.transmitter == TransmitterKind::kUniform;
  agents_.reserve(n_nodes_);
  for (std::size_t i = 0; i < n_nodes_; ++i) agents_.emplace_back(params, uniform);
  view_.values = Matrix(n_nodes_, n_resources_);
  view_.age.assign(n_nodes_, 0);

  const auto groups = resource_groups(config_.clustering_mode, n_resources_);
  if (config_.clustering == ClusteringKind::kStatic && static_assignments.size() != groups.size()) {
    throw std::invalid_argument("static clustering needs one assignment per resource group");
  }
  pipelines_.reserve(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    pipelines_.emplace_back(config_, g, groups[g], n_nodes_,
                            config_.clustering == ClusteringKind::kStatic
                                ? std::move(static_assignments[g])
                                : std::vector<std::int32_t>{});
  }
}

OnlineSimulator::StepResult OnlineSimulator::step(std::span<const double> measurements) {
  if (measurements.size() != n_nodes_ * n_resources_) {
    throw std::invalid_argument("step: expected N x d measurements");
  }
  ++t_;
  StepResult result;
  result.t = t_;
  result.transmitted.assign(n_nodes_, 0);
  for (std::size_t i = 0; i < n_nodes_; ++i) {
    const auto x = measurements.subspan(i * n_resources_, n_resources_);
    if (agents_[i].step(x)) {
      result.transmitted[i] = 1;
      std::copy(x.begin(), x.end(), view_.values.row(i).begin());
      view_.age[i] = 0;
    } else {
      ++view_.age[i];
    }
  }
  result.pipelines.reserve(pipelines_.size());
  for (auto& p : pipelines_) result.pipelines.push_back(p.step(t_, view_));
  return result;
}

// ---------------------------------------------------------------------------
// run

double RunResult::time_avg(std::size_t h, const std::string& resource) const {
  for (const auto& row : aggregates) {
    if (row.h == h && row.resource == resource) return row.time_avg_rmse;
  }
  throw std::out_of_range("no aggregate for h=" + std::to_string(h) + " resource " + resource);
}

double RunResult::mean_frequency() const {
  if (frequencies.empty()) return 0.0;
  double s = 0.0;
  for (double f : frequencies) s += f;
  return s / static_cast<double>(frequencies.size());
}

namespace {

double column_rmse(const Matrix& estimate, std::size_t est_col, std::span<const double> truth_step,
                   std::size_t d, std::size_t r, std::vector<double>& a, std::vector<double>& b) {
  const std::size_t n = estimate.rows();
  a.resize(n);
  b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = estimate(i, est_col);
    b[i] = truth_step[i * d + r];
  }
  return std::sqrt(kernels::sum_squared_diff(a, b) / static_cast<double>(n));
}

}  // namespace

RunResult run(const ExperimentConfig& config, const TraceDataset& dataset) {
  config.validate();
  dataset.validate();
  const std::size_t N = dataset.n_nodes;
  const std::size_t d = dataset.n_resources;
  const std::size_t T = dataset.n_steps;
  if (config.k > N) throw std::invalid_argument("k exceeds the number of nodes");
  const std::vector<std::size_t> hs = config.evaluated_horizons();
  const std::size_t max_h = hs.back();
  if (max_h >= 1) {
    const std::size_t need = (config.include_warmup ? 1 : static_cast<std::size_t>(config.w_init)) + max_h;
    if (T < need) {
      throw std::invalid_argument("dataset too short: " + std::to_string(T) + " steps, need " +
                                  std::to_string(need) + " (w_init + max horizon)");
    }
  }

  const auto groups = resource_groups(config.clustering_mode, d);
  std::vector<std::vector<std::int32_t>> static_assignments;
  RunResult result;
  if (config.clustering == ClusteringKind::kStatic) {
    result.offline = true;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      static_assignments.push_back(clustering::static_baseline(
          dataset, groups[g], config.k, derive_seed(config.seed, {0x57a7, g})));
    }
  }
  OnlineSimulator sim(config, N, d, std::move(static_assignments));

  std::map<std::size_t, std::size_t> h_index;
  for (std::size_t a = 0; a < hs.size(); ++a) h_index[hs[a]] = a;
  // per_step[h_index][r] -> per-step RMSEs entering the aggregate
  std::vector<std::vector<std::vector<double>>> per_step(hs.size(), std::vector<std::vector<double>>(d));
  std::vector<std::vector<double>> intermediate(d);
  std::vector<std::vector<std::optional<double>>> step_table(hs.size(), std::vector<std::optional<double>>(d));
  std::vector<double> a, b;

  for (std::size_t s = 0; s < T; ++s) {
    const auto truth_now = dataset.step(s);
    const auto res = sim.step(truth_now);
    const std::int64_t t = res.t;
    const bool warm = t < config.w_init;
    for (auto& row : step_table) std::fill(row.begin(), row.end(), std::nullopt);

    for (std::size_t r = 0; r < d; ++r) {
      step_table[h_index.at(0)][r] = column_rmse(sim.view().values, r, truth_now, d, r, a, b);
    }
    const auto& pipes = sim.pipelines();
    for (std::size_t p = 0; p < pipes.size(); ++p) {
      const auto& out = res.pipelines[p];
      const auto& snap = *out.snapshot;
      for (std::size_t q = 0; q < pipes[p].resources().size(); ++q) {
        const std::size_t r = pipes[p].resources()[q];
        double sse = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
          const double diff =
              snap.stored(i, q) - snap.centroids(static_cast<std::size_t>(out.partition->assignment[i]), q);
          sse += diff * diff;
        }
        intermediate[r].push_back(std::sqrt(sse / static_cast<double>(N)));
        if (config.dump_assignments) {
          for (std::size_t i = 0; i < N; ++i) {
            result.assignments.push_back({t, i, dataset.resource_names[r], out.partition->assignment[i]});
          }
        }
      }
      for (const auto& rec : out.forecasts) {
        if (s + rec.h >= T) continue;
        const auto truth_then = dataset.step(s + rec.h);
        for (std::size_t q = 0; q < pipes[p].resources().size(); ++q) {
          const std::size_t r = pipes[p].resources()[q];
          step_table[h_index.at(rec.h)][r] = column_rmse(rec.clamped, q, truth_then, d, r, a, b);
          if (config.dump_forecasts) {
            for (std::size_t i = 0; i < N; ++i) {
              result.forecasts.push_back({t, rec.h, i, dataset.resource_names[r], rec.clamped(i, q),
                                          truth_then[i * d + r]});
            }
          }
        }
      }
    }

    for (std::size_t hi = 0; hi < hs.size(); ++hi) {
      for (std::size_t r = 0; r < d; ++r) {
        if (!step_table[hi][r]) continue;
        const double v = *step_table[hi][r];
        result.metrics.push_back({t, hs[hi], dataset.resource_names[r], v});
        if (hs[hi] == 0 || !warm || config.include_warmup) per_step[hi][r].push_back(v);
      }
    }
  }

  result.n_steps = static_cast<std::int64_t>(T);
  for (std::size_t r = 0; r < d; ++r) {
    const std::string& name = dataset.resource_names[r];
    std::map<std::size_t, double> by_h;
    for (std::size_t hi = 0; hi < hs.size(); ++hi) {
      if (per_step[hi][r].empty()) {
        throw std::invalid_argument("dataset too short to score horizon " + std::to_string(hs[hi]));
      }
      const double avg = evaluation::time_avg_rmse(per_step[hi][r]);
      by_h[hs[hi]] = avg;
      const double contrib =
          hs[hi] <= config.max_horizon ? avg * avg / static_cast<double>(config.max_horizon + 1) : 0.0;
      result.aggregates.push_back({hs[hi], name, avg, contrib, per_step[hi][r].size()});
    }
    result.objective[name] = evaluation::objective(by_h, config.max_horizon);
    result.intermediate_rmse[name] = evaluation::time_avg_rmse(intermediate[r]);
    result.std_baseline[name] = evaluation::std_baseline(dataset, r, config.std_mode);
  }
  std::stable_sort(result.aggregates.begin(), result.aggregates.end(),
                   [](const auto& x, const auto& y) { return x.h < y.h; });
  for (const auto& agent : sim.transmitters()) {
    const std::int64_t sent = agent.state().sent_count;
    result.sent_counts.push_back(sent);
    const double f = static_cast<double>(sent) / static_cast<double>(T);
    result.frequencies.push_back(f);
    result.budget_slack.push_back(f - config.budget);
  }
  for (const auto& p : sim.pipelines()) result.ar_fallbacks += p.bank().fallback_count();
  return result;
}

// ---------------------------------------------------------------------------
// outputs

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

void write_outputs(const RunResult& result, const ExperimentConfig& config,
                   const TraceDataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "manifest");
    out << "# reproduce with: monisum run --config <this file> --trace <trace>\n";
    out << "version = " << version_string() << '\n';
    write_config(out, config);
    out << "run.trace_nodes = " << dataset.n_nodes << '\n';
    out << "run.trace_steps = " << dataset.n_steps << '\n';
    std::string names;
    for (std::size_t r = 0; r < dataset.n_resources; ++r) {
      names += (r ? "," : "") + dataset.resource_names[r];
    }
    out << "run.resources = " << names << '\n';
    out << "run.offline = " << (result.offline ? "true" : "false") << '\n';
    out << "run.warmup_steps = " << std::max<std::int64_t>(0, config.w_init - 1) << '\n';
    out << "run.warmup_excluded = " << (config.include_warmup ? "false" : "true") << '\n';
    out << "run.simd = " << kernels::isa_name(kernels::active().isa) << '\n';
    for (const auto& [r, v] : result.objective) out << "result.objective." << r << " = " << num(v) << '\n';
    for (const auto& [r, v] : result.intermediate_rmse) {
      out << "result.intermediate_rmse." << r << " = " << num(v) << '\n';
    }
    for (const auto& [r, v] : result.std_baseline) {
      out << "result.std_baseline." << r << " = " << num(v) << '\n';
    }
    out << "result.mean_frequency = " << num(result.mean_frequency()) << '\n';
    out << "result.ar_fallbacks = " << result.ar_fallbacks << '\n';
  }
  {
    auto out = open_out(dir / "metrics.csv");
    out << "t,h,resource,rmse\n";
    for (const auto& m : result.metrics) {
      out << m.t << ',' << m.h << ',' << m.resource << ',' << num(m.rmse) << '\n';
    }
  }
  {
    auto out = open_out(dir / "aggregate.csv");
    out << "h,resource,time_avg_rmse,objective_contrib\n";
    for (const auto& a : result.aggregates) {
      out << a.h << ',' << a.resource << ',' << num(a.time_avg_rmse) << ','
          << num(a.objective_contrib) << '\n';
    }
  }
  {
    auto out = open_out(dir / "frequencies.csv");
    out << "node,sent,frequency\n";
    for (std::size_t i = 0; i < result.sent_counts.size(); ++i) {
      out << (dataset.node_ids.empty() ? std::to_string(i) : dataset.node_ids[i]) << ','
          << result.sent_counts[i] << ',' << num(result.frequencies[i]) << '\n';
    }
  }
  if (config.dump_assignments) {
    auto out = open_out(dir / "assignments.csv");
    out << "t,node,resource,label\n";
    for (const auto& a : result.assignments) {
      out << a.t << ',' << a.node << ',' << a.resource << ',' << a.label << '\n';
    }
  }
  if (config.dump_forecasts) {
    auto out = open_out(dir / "forecasts.csv");
    out << "t,h,node,resource,forecast,true\n";
    for (const auto& f : result.forecasts) {
      out << f.t << ',' << f.h << ',' << f.node << ',' << f.resource << ',' << num(f.forecast) << ','
          << num(f.truth) << '\n';
    }
  }
}

}  // namespace monisum::pipeline
