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

#include "monisum/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "monisum/kernels.hpp"

namespace monisum::evaluation {

double rmse(const Matrix& forecast, const Matrix& truth) {
  if (forecast.rows() != truth.rows() || forecast.cols() != truth.cols()) {
    throw std::invalid_argument("rmse: shape mismatch");
  }
  if (forecast.rows() == 0) throw std::invalid_argument("rmse: no rows");
  const double sse = kernels::sum_squared_diff(forecast.values(), truth.values());
  return std::sqrt(sse / static_cast<double>(forecast.rows()));
}

double time_avg_rmse(std::span<const double> per_step) {
  if (per_step.empty()) throw std::invalid_argument("time_avg_rmse: no steps");
  double sum = 0.0;
  for (double r : per_step) sum += r * r;
  return std::sqrt(sum / static_cast<double>(per_step.size()));
}

double objective(const std::map<std::size_t, double>& time_avg_by_h, std::size_t max_h) {
  double sum = 0.0;
  for (std::size_t h = 0; h <= max_h; ++h) {
    const auto it = time_avg_by_h.find(h);
    if (it == time_avg_by_h.end()) {
      throw std::invalid_argument("objective: missing horizon " + std::to_string(h));
    }
    sum += it->second * it->second;
  }
  return std::sqrt(sum / static_cast<double>(max_h + 1));
}

double intermediate_rmse_step(const Matrix& stored, std::span<const std::int32_t> labels,
                              const Matrix& centroids) {
  if (labels.size() != stored.rows()) throw std::invalid_argument("intermediate: size mismatch");
  if (centroids.cols() != stored.cols()) throw std::invalid_argument("intermediate: dim mismatch");
  double sse = 0.0;
  for (std::size_t i = 0; i < stored.rows(); ++i) {
    sse += kernels::sum_squared_diff(stored.row(i),
                                     centroids.row(static_cast<std::size_t>(labels[i])));
  }
  return std::sqrt(sse / static_cast<double>(stored.rows()));
}

double intermediate_rmse(std::span<const Matrix> stored,
                         std::span<const clustering::Partition> partitions) {
  if (stored.size() != partitions.size()) {
    throw std::invalid_argument("intermediate_rmse: partitions do not cover the window");
  }
  std::vector<double> per_step;
  per_step.reserve(stored.size());
  for (std::size_t s = 0; s < stored.size(); ++s) {
    per_step.push_back(
        intermediate_rmse_step(stored[s], partitions[s].assignment, partitions[s].centroids));
  }
  return time_avg_rmse(per_step);
}

double std_baseline(const TraceDataset& ds, std::size_t resource, StdMode mode) {
  if (resource >= ds.n_resources) throw std::invalid_argument("std_baseline: bad resource");
  if (mode == StdMode::kPooled) {
    double sum = 0.0;
    const double n = static_cast<double>(ds.n_steps * ds.n_nodes);
    for (std::size_t c = resource; c < ds.values.size(); c += ds.n_resources) sum += ds.values[c];
    const double mean = sum / n;
    double var = 0.0;
    for (std::size_t c = resource; c < ds.values.size(); c += ds.n_resources) {
      const double d = ds.values[c] - mean;
      var += d * d;
    }
    return std::sqrt(var / n);
  }
  double total_var = 0.0;
  for (std::size_t i = 0; i < ds.n_nodes; ++i) {
    const std::vector<double> s = ds.series(i, resource);
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= static_cast<double>(s.size());
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    total_var += var / static_cast<double>(s.size());
  }
  return std::sqrt(total_var / static_cast<double>(ds.n_nodes));
}

namespace {

// Centers x in place; returns the population norm sqrt(sum (x - mean)^2).
double center(std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (double& v : x) v -= mean;
  return std::sqrt(kernels::dot(x, x));
}

bool is_constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("pearson: length mismatch");
  if (is_constant(x) || is_constant(y)) throw std::invalid_argument("pearson: constant series");
  std::vector<double> a(x.begin(), x.end()), b(y.begin(), y.end());
  const double na = center(a);
  const double nb = center(b);
  return std::clamp(kernels::dot(a, b) / (na * nb), -1.0, 1.0);
}

CorrelationCdf correlation_cdf(const TraceDataset& ds, std::size_t resource) {
  if (resource >= ds.n_resources) throw std::invalid_argument("correlation_cdf: bad resource");
  if (ds.n_nodes < 2) throw std::invalid_argument("correlation_cdf: need at least two nodes");
  CorrelationCdf out;
  std::vector<std::vector<double>> centered;
  std::vector<double> norms;
  for (std::size_t i = 0; i < ds.n_nodes; ++i) {
    std::vector<double> s = ds.series(i, resource);
    if (is_constant(s)) {
      ++out.excluded_constant;
      continue;
    }
    norms.push_back(center(s));
    centered.push_back(std::move(s));
  }
  if (centered.size() < 2) {
    throw std::invalid_argument("correlation_cdf: fewer than two non-constant series");
  }
  for (std::size_t a = 0; a < centered.size(); ++a) {
    for (std::size_t b = a + 1; b < centered.size(); ++b) {
      const double c = kernels::dot(centered[a], centered[b]) / (norms[a] * norms[b]);
      out.values.push_back(std::clamp(c, -1.0, 1.0));
    }
  }
  std::sort(out.values.begin(), out.values.end());
  const auto n = static_cast<double>(out.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.cdf.push_back(static_cast<double>(i + 1) / n);
  }
  return out;
}

double adjusted_rand_index(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand_index: size mismatch");
  const auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  std::map<std::pair<std::int32_t, std::int32_t>, double> joint;
  std::map<std::int32_t, double> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++joint[{a[i], b[i]}];
    ++ra[a[i]];
    ++rb[b[i]];
  }
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& [_, c] : joint) index += choose2(c);
  for (const auto& [_, c] : ra) sa += choose2(c);
  for (const auto& [_, c] : rb) sb += choose2(c);
  const double expected = sa * sb / choose2(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sa + sb);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace monisum::evaluation
