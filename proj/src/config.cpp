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

#include "monisum/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace monisum {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value) {
  throw std::invalid_argument("invalid value '" + value + "' for '" + key + "'");
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(key, v);
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(key, v);
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, v);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(TransmitterKind kind) {
  return kind == TransmitterKind::kAdaptive ? "adaptive" : "uniform";
}

std::string to_string(ClusteringKind kind) {
  switch (kind) {
    case ClusteringKind::kDynamic: return "dynamic";
    case ClusteringKind::kStatic: return "static";
    case ClusteringKind::kMinDistance: return "min-distance";
  }
  return "?";
}

std::string to_string(FeatureMode mode) {
  return mode == FeatureMode::kScalar ? "scalar" : "joint";
}

std::string to_string(clustering::SimilarityMeasure measure) {
  return measure == clustering::SimilarityMeasure::kIntersection ? "intersection" : "jaccard";
}

std::string to_string(evaluation::StdMode mode) {
  return mode == evaluation::StdMode::kPooled ? "pooled" : "per-node";
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (!(budget > 0.0 && budget <= 1.0)) fail("budget must lie in (0,1]");
  if (!(v0 > 0.0)) fail("v0 must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0,1)");
  if (k < 1) fail("k must be >= 1");
  if (m < 1) fail("m must be >= 1");
  if (window < 1) fail("window must be >= 1");
  if (order < 1) fail("order must be >= 1");
  if (w_init < 1) fail("w_init must be >= 1");
  if (w_retrain < 1) fail("w_retrain must be >= 1");
  if (forecaster == "ar" && static_cast<std::size_t>(w_init) < order + 1) {
    fail("w_init must be at least order + 1 for the ar forecaster");
  }
  if (horizons.empty()) fail("horizons must not be empty");
  if (train_len < 1 || test_len < 1) fail("train_len and test_len must be >= 1");
}

std::vector<std::size_t> ExperimentConfig::evaluated_horizons() const {
  std::set<std::size_t> hs(horizons.begin(), horizons.end());
  for (std::size_t h = 0; h <= max_horizon; ++h) hs.insert(h);
  return {hs.begin(), hs.end()};
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "budget") c.budget = to_double(key, v);
  else if (key == "v0") c.v0 = to_double(key, v);
  else if (key == "gamma") c.gamma = to_double(key, v);
  else if (key == "queue_projection") c.queue_projection = to_bool(key, v);
  else if (key == "transmitter") {
    if (v == "adaptive") c.transmitter = TransmitterKind::kAdaptive;
    else if (v == "uniform") c.transmitter = TransmitterKind::kUniform;
    else bad(key, v);
  } else if (key == "k") c.k = to_int<std::size_t>(key, v);
  else if (key == "m") c.m = to_int<std::size_t>(key, v);
  else if (key == "window") c.window = to_int<std::size_t>(key, v);
  else if (key == "clustering_mode") {
    if (v == "scalar") c.clustering_mode = FeatureMode::kScalar;
    else if (v == "joint") c.clustering_mode = FeatureMode::kJoint;
    else bad(key, v);
  } else if (key == "clustering") {
    if (v == "dynamic") c.clustering = ClusteringKind::kDynamic;
    else if (v == "static") c.clustering = ClusteringKind::kStatic;
    else if (v == "min-distance") c.clustering = ClusteringKind::kMinDistance;
    else bad(key, v);
  } else if (key == "similarity") {
    if (v == "intersection") c.similarity = clustering::SimilarityMeasure::kIntersection;
    else if (v == "jaccard") c.similarity = clustering::SimilarityMeasure::kJaccard;
    else bad(key, v);
  } else if (key == "m_prime") c.m_prime = to_int<std::size_t>(key, v);
  else if (key == "forecaster") {
    if (v.empty()) bad(key, v);
    c.forecaster = v;
  } else if (key == "order") c.order = to_int<std::size_t>(key, v);
  else if (key == "w_init") c.w_init = to_int<std::int64_t>(key, v);
  else if (key == "w_retrain") c.w_retrain = to_int<std::int64_t>(key, v);
  else if (key == "horizons") {
    std::vector<std::size_t> hs;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) hs.push_back(to_int<std::size_t>(key, trim(item)));
    if (hs.empty()) bad(key, v);
    c.horizons = std::move(hs);
  } else if (key == "max_horizon") c.max_horizon = to_int<std::size_t>(key, v);
  else if (key == "include_warmup") c.include_warmup = to_bool(key, v);
  else if (key == "std_mode") {
    if (v == "pooled") c.std_mode = evaluation::StdMode::kPooled;
    else if (v == "per-node") c.std_mode = evaluation::StdMode::kPerNode;
    else bad(key, v);
  } else if (key == "dump_assignments") c.dump_assignments = to_bool(key, v);
  else if (key == "dump_forecasts") c.dump_forecasts = to_bool(key, v);
  else if (key == "train_len") c.train_len = to_int<std::size_t>(key, v);
  else if (key == "test_len") c.test_len = to_int<std::size_t>(key, v);
  else if (key == "seed") c.seed = to_int<std::uint64_t>(key, v);
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.rfind("run.", 0) == 0 || key.rfind("result.", 0) == 0 || key == "version") continue;
    try {
      apply_setting(base, key, line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  return parse_config(in, std::move(base));
}

std::vector<std::pair<std::string, std::string>> to_settings(const ExperimentConfig& c) {
  std::string hs;
  for (std::size_t i = 0; i < c.horizons.size(); ++i) {
    if (i) hs += ',';
    hs += std::to_string(c.horizons[i]);
  }
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {
      {"budget", fmt_double(c.budget)},
      {"v0", fmt_double(c.v0)},
      {"gamma", fmt_double(c.gamma)},
      {"queue_projection", b(c.queue_projection)},
      {"transmitter", to_string(c.transmitter)},
      {"k", std::to_string(c.k)},
      {"m", std::to_string(c.m)},
      {"window", std::to_string(c.window)},
      {"clustering_mode", to_string(c.clustering_mode)},
      {"clustering", to_string(c.clustering)},
      {"similarity", to_string(c.similarity)},
      {"m_prime", std::to_string(c.m_prime)},
      {"forecaster", c.forecaster},
      {"order", std::to_string(c.order)},
      {"w_init", std::to_string(c.w_init)},
      {"w_retrain", std::to_string(c.w_retrain)},
      {"horizons", hs},
      {"max_horizon", std::to_string(c.max_horizon)},
      {"include_warmup", b(c.include_warmup)},
      {"std_mode", to_string(c.std_mode)},
      {"dump_assignments", b(c.dump_assignments)},
      {"dump_forecasts", b(c.dump_forecasts)},
      {"train_len", std::to_string(c.train_len)},
      {"test_len", std::to_string(c.test_len)},
      {"seed", std::to_string(c.seed)},
  };
}

void write_config(std::ostream& out, const ExperimentConfig& config) {
  for (const auto& [k, v] : to_settings(config)) out << k << " = " << v << '\n';
}

std::size_t thread_cap() {
  std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MONISUM_THREADS")) {
    std::size_t v = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) cap = v;
  }
  return cap;
}

}  // namespace monisum
