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

#include "monisum/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "monisum/rng.hpp"

namespace monisum {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

std::vector<double> TraceDataset::series(std::size_t node, std::size_t r) const {
  std::vector<double> out(n_steps);
  for (std::size_t t = 0; t < n_steps; ++t) out[t] = at(t, node, r);
  return out;
}

void TraceDataset::validate() const {
  if (n_nodes == 0 || n_steps == 0 || n_resources == 0) {
    throw TraceError("trace has an empty dimension");
  }
  if (values.size() != n_steps * n_nodes * n_resources) {
    throw TraceError("trace value count does not match its dimensions");
  }
  if (resource_names.size() != n_resources) {
    throw TraceError("trace resource names do not match resource count");
  }
  if (!node_ids.empty() && node_ids.size() != n_nodes) {
    throw TraceError("trace node ids do not match node count");
  }
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw TraceError("trace value outside [0,1]");
    }
  }
}

TraceDataset parse_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    for (std::string_view f : split(line)) header.emplace_back(f);
    break;
  }
  if (header.empty()) throw TraceError("empty trace file");

  auto column_of = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw TraceError("missing column '" + name + "'", line_no);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t time_col = column_of(schema.time_column);
  const std::size_t node_col = column_of(schema.node_column);
  std::vector<std::size_t> resource_cols;
  std::vector<std::string> resource_names;
  if (schema.resource_columns.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == time_col || c == node_col) continue;
      resource_cols.push_back(c);
      resource_names.push_back(header[c]);
    }
  } else {
    for (const std::string& name : schema.resource_columns) {
      resource_cols.push_back(column_of(name));
      resource_names.push_back(name);
    }
  }
  if (resource_cols.empty()) throw TraceError("trace has no resource columns", line_no);
  const std::size_t d = resource_cols.size();

  std::vector<double> times;
  std::vector<std::string> node_ids;
  std::unordered_map<std::string, std::size_t> node_index;
  // cells[step][node] -> (values, source line); filled densely afterwards.
  std::vector<std::vector<std::optional<std::pair<std::vector<double>, std::size_t>>>> cells;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw TraceError(at_line(line_no) + "expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    const auto t = parse_double(fields[time_col]);
    if (!t || !std::isfinite(*t)) {
      throw TraceError(at_line(line_no) + "malformed time '" + std::string(fields[time_col]) +
                           "'",
                       line_no);
    }
    if (!times.empty() && *t < times.back()) {
      throw TraceError(at_line(line_no) + "time goes backwards", line_no);
    }
    if (times.empty() || *t > times.back()) {
      times.push_back(*t);
      cells.emplace_back(node_ids.size());
    }
    const std::string node(fields[node_col]);
    if (node.empty()) throw TraceError(at_line(line_no) + "empty node id", line_no);
    auto [it, inserted] = node_index.try_emplace(node, node_ids.size());
    if (inserted) {
      node_ids.push_back(node);
      for (auto& step : cells) step.resize(node_ids.size());
    }
    auto& cell = cells.back()[it->second];
    if (cell) {
      throw TraceError(at_line(line_no) + "duplicate (t,node) pair (" +
                           std::string(fields[time_col]) + "," + node + ")",
                       line_no);
    }
    std::vector<double> v(d);
    for (std::size_t r = 0; r < d; ++r) {
      const auto value = parse_double(fields[resource_cols[r]]);
      if (!value || !std::isfinite(*value)) {
        throw TraceError(at_line(line_no) + "malformed value '" +
                             std::string(fields[resource_cols[r]]) + "'",
                         line_no);
      }
      double x = *value;
      const bool below = x < 0.0;
      const bool above = schema.normalization == Normalization::kNone && x > 1.0;
      if (below || above) {
        if (!schema.clamp) {
          throw TraceError(at_line(line_no) + "value " + std::string(fields[resource_cols[r]]) +
                               " of '" + resource_names[r] + "' outside [0,1]",
                           line_no);
        }
        x = below ? 0.0 : 1.0;
      }
      v[r] = x;
    }
    cell.emplace(std::move(v), line_no);
  }
  if (times.empty()) throw TraceError("trace file has a header but no rows");

  TraceDataset ds;
  ds.n_steps = times.size();
  ds.n_nodes = node_ids.size();
  ds.n_resources = d;
  ds.resource_names = std::move(resource_names);
  ds.node_ids = std::move(node_ids);
  ds.step_seconds = schema.step_seconds;
  if (times.size() >= 2) ds.step_seconds = times[1] - times[0];
  ds.values.assign(ds.n_steps * ds.n_nodes * d, 0.0);

  for (std::size_t i = 0; i < ds.n_nodes; ++i) {
    // Carry the last observation forward; before the first one, use the first.
    const std::vector<double>* last = nullptr;
    for (std::size_t t = 0; t < ds.n_steps && last == nullptr; ++t) {
      if (i < cells[t].size() && cells[t][i]) last = &cells[t][i]->first;
    }
    for (std::size_t t = 0; t < ds.n_steps; ++t) {
      if (i < cells[t].size() && cells[t][i]) last = &cells[t][i]->first;
      for (std::size_t r = 0; r < d; ++r) ds.at(t, i, r) = (*last)[r];
    }
  }
  if (schema.normalization == Normalization::kMax) normalize_by_max(ds);
  return ds;
}

TraceDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open trace file '" + path.string() + "'");
  return parse_csv(in, schema);
}

void normalize_by_max(TraceDataset& ds) {
  for (std::size_t r = 0; r < ds.n_resources; ++r) {
    double peak = 0.0;
    for (std::size_t c = r; c < ds.values.size(); c += ds.n_resources) {
      peak = std::max(peak, ds.values[c]);
    }
    if (peak <= 0.0) continue;
    for (std::size_t c = r; c < ds.values.size(); c += ds.n_resources) ds.values[c] /= peak;
  }
}

void write_csv(const TraceDataset& ds, std::ostream& out, const CsvWriteOptions& options) {
  if (ds.n_steps == 0 || ds.n_nodes == 0) throw TraceError("cannot write an empty trace");
  ds.validate();
  char buf[64];
  out << "t,node";
  for (const std::string& name : ds.resource_names) out << ',' << name;
  out << '\n';
  for (std::size_t t = 0; t < ds.n_steps; ++t) {
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(t) * ds.step_seconds);
    const std::string time(buf);
    for (std::size_t i = 0; i < ds.n_nodes; ++i) {
      out << time << ',' << (ds.node_ids.empty() ? std::to_string(i) : ds.node_ids[i]);
      for (std::size_t r = 0; r < ds.n_resources; ++r) {
        std::snprintf(buf, sizeof buf, "%.*g", options.significant_digits, ds.at(t, i, r));
        out << ',' << buf;
      }
      out << '\n';
    }
  }
}

void write_csv(const TraceDataset& ds, const std::filesystem::path& path,
               const CsvWriteOptions& options) {
  if (ds.n_steps == 0 || ds.n_nodes == 0) throw TraceError("cannot write an empty trace");
  std::ofstream out(path);
  if (!out) throw TraceError("cannot open '" + path.string() + "' for writing");
  write_csv(ds, out, options);
  if (!out.flush()) throw TraceError("write to '" + path.string() + "' failed");
}

SyntheticTrace generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_nodes == 0 || spec.n_steps == 0 || spec.n_resources == 0 || spec.n_groups == 0) {
    throw std::invalid_argument("synthetic trace dimensions must be positive");
  }
  if (spec.n_groups > spec.n_nodes) {
    throw std::invalid_argument("synthetic trace needs n_groups <= n_nodes");
  }
  if (!(spec.switch_probability >= 0.0 && spec.switch_probability < 1.0)) {
    throw std::invalid_argument("switch_probability must lie in [0,1)");
  }
  if (!(spec.noise_std >= 0.0)) throw std::invalid_argument("noise_std must be >= 0");
  if (!(spec.jump_probability >= 0.0 && spec.jump_probability <= 1.0)) {
    throw std::invalid_argument("jump_probability must lie in [0,1]");
  }
  if (!(spec.base_period > 0.0)) throw std::invalid_argument("base_period must be > 0");

  const std::size_t G = spec.n_groups;
  const std::size_t N = spec.n_nodes;
  const std::size_t T = spec.n_steps;
  const std::size_t d = spec.n_resources;
  const double g_inv = 1.0 / static_cast<double>(G);
  const double amplitude = spec.amplitude >= 0.0 ? spec.amplitude : 0.2 * g_inv;
  const double walk_step = spec.walk_step >= 0.0 ? spec.walk_step : 0.002 * g_inv;
  const double walk_bound = spec.walk_bound >= 0.0 ? spec.walk_bound : 0.1 * g_inv;
  const double jump_size = spec.jump_size >= 0.0 ? spec.jump_size : 0.25 * g_inv;

  // Group base signals, [step][group][resource].
  std::vector<double> base(T * G * d);
  for (std::size_t g = 0; g < G; ++g) {
    const double level = (static_cast<double>(g) + 0.5) * g_inv;
    const double period = spec.base_period * (1.0 + 0.5 * static_cast<double>(g));
    for (std::size_t r = 0; r < d; ++r) {
      std::mt19937_64 rng(derive_seed(spec.seed, {1, g, r}));
      std::normal_distribution<double> step(0.0, 1.0);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(g) * g_inv +
                           static_cast<double>(r) * std::numbers::pi / 3.0;
      double walk = 0.0;
      double jump = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        if (t > 0) {
          walk += walk_step * step(rng);
          if (walk > walk_bound) walk = 2.0 * walk_bound - walk;
          if (walk < -walk_bound) walk = -2.0 * walk_bound - walk;
          walk = std::clamp(walk, -walk_bound, walk_bound);
        }
        if (spec.jump_probability > 0.0 && unit(rng) < spec.jump_probability) {
          jump = jump_size * (2.0 * unit(rng) - 1.0);
        }
        const double wave =
            amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase);
        base[(t * G + g) * d + r] = std::clamp(level + wave + walk + jump, 0.0, 1.0);
      }
    }
  }

  SyntheticTrace out;
  TraceDataset& ds = out.dataset;
  ds.n_nodes = N;
  ds.n_steps = T;
  ds.n_resources = d;
  ds.step_seconds = spec.step_seconds;
  for (std::size_t r = 0; r < d; ++r) {
    ds.resource_names.push_back(d == 2 ? (r == 0 ? "cpu" : "mem") : "r" + std::to_string(r));
  }
  for (std::size_t i = 0; i < N; ++i) ds.node_ids.push_back(std::to_string(i));
  ds.values.assign(T * N * d, 0.0);
  out.groups.assign(T * N, 0);

  std::mt19937_64 switch_rng(derive_seed(spec.seed, {3}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::int32_t> group(N);
  for (std::size_t i = 0; i < N; ++i) group[i] = static_cast<std::int32_t>(i % G);

  std::vector<std::mt19937_64> noise_rng;
  noise_rng.reserve(N);
  for (std::size_t i = 0; i < N; ++i) noise_rng.emplace_back(derive_seed(spec.seed, {2, i}));
  std::normal_distribution<double> noise(0.0, 1.0);

  for (std::size_t t = 0; t < T; ++t) {
    if (t > 0 && G > 1 && spec.switch_probability > 0.0) {
      for (std::size_t i = 0; i < N; ++i) {
        if (unit(switch_rng) < spec.switch_probability) {
          // Uniform over the other G-1 groups.
          auto other = static_cast<std::int32_t>(unit(switch_rng) * static_cast<double>(G - 1));
          other = std::min<std::int32_t>(other, static_cast<std::int32_t>(G - 2));
          group[i] = other >= group[i] ? other + 1 : other;
        }
      }
    }
    for (std::size_t i = 0; i < N; ++i) {
      out.groups[t * N + i] = group[i];
      for (std::size_t r = 0; r < d; ++r) {
        double v = base[(t * G + static_cast<std::size_t>(group[i])) * d + r];
        if (spec.noise_std > 0.0) v += spec.noise_std * noise(noise_rng[i]);
        ds.at(t, i, r) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return out;
}

}  // namespace monisum
