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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "monisum/pipeline.hpp"

namespace monisum::pipeline {

SweepAxis parse_axis(const std::string& name) {
  if (name == "B" || name == "budget") return SweepAxis::kBudget;
  if (name == "K" || name == "k") return SweepAxis::kK;
  if (name == "h") return SweepAxis::kHorizon;
  if (name == "M" || name == "m") return SweepAxis::kM;
  if (name == "Mprime" || name == "M'" || name == "m_prime") return SweepAxis::kMPrime;
  throw std::invalid_argument("unknown sweep axis '" + name + "' (expected B, K, h, M or Mprime)");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kBudget: return "B";
    case SweepAxis::kK: return "K";
    case SweepAxis::kHorizon: return "h";
    case SweepAxis::kM: return "M";
    case SweepAxis::kMPrime: return "Mprime";
  }
  return "?";
}

namespace {

std::size_t as_count(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v)) {
    throw std::invalid_argument(std::string("sweep: ") + what + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

ExperimentConfig with_value(ExperimentConfig cfg, SweepAxis axis, double v) {
  switch (axis) {
    case SweepAxis::kBudget: cfg.budget = v; break;
    case SweepAxis::kK: cfg.k = as_count(v, "K"); break;
    case SweepAxis::kHorizon:
      cfg.horizons = {0, as_count(v, "h")};
      cfg.max_horizon = 0;
      break;
    case SweepAxis::kM: cfg.m = as_count(v, "M"); break;
    case SweepAxis::kMPrime: cfg.m_prime = as_count(v, "Mprime"); break;
  }
  cfg.validate();
  return cfg;
}

std::vector<SweepRow> rows_for(const RunResult& r, SweepAxis axis, double v) {
  std::vector<SweepRow> rows;
  for (const auto& a : r.aggregates) {
    if (axis == SweepAxis::kHorizon && a.h != static_cast<std::size_t>(v)) continue;
    rows.push_back({to_string(axis), v, a.h, a.resource, a.time_avg_rmse, r.objective.at(a.resource),
                    r.intermediate_rmse.at(a.resource), r.mean_frequency()});
  }
  return rows;
}

}  // namespace

std::vector<SweepRow> sweep(const ExperimentConfig& base, SweepAxis axis,
                            std::span<const double> values, const TraceDataset& dataset) {
  if (values.empty()) throw std::invalid_argument("sweep: no values");
  std::vector<ExperimentConfig> configs;
  for (double v : values) configs.push_back(with_value(base, axis, v));

  std::vector<std::vector<SweepRow>> out(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        out[i] = rows_for(run(configs[i], dataset), axis, values[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(thread_cap(), values.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<SweepRow> rows;
  for (auto& part : out) rows.insert(rows.end(), part.begin(), part.end());
  return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << "axis,value,h,resource,time_avg_rmse,objective,intermediate_rmse,mean_frequency\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.12g,%zu,%s,%.12g,%.12g,%.12g,%.12g\n", r.axis.c_str(),
                  r.value, r.h, r.resource.c_str(), r.time_avg_rmse, r.objective,
                  r.intermediate_rmse, r.mean_frequency);
    out << buf;
  }
}

}  // namespace monisum::pipeline
