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

#include "monisum/forecasting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "monisum/kernels.hpp"

namespace monisum::forecasting {

// ---------------------------------------------------------------------------
// Registry

ForecasterRegistry& ForecasterRegistry::global() {
  static ForecasterRegistry registry = [] {
    ForecasterRegistry r;
    r.add("sample-and-hold", [](std::size_t) { return std::make_unique<SampleAndHold>(); });
    r.add("ar", [](std::size_t order) { return std::make_unique<AutoRegressive>(order); });
    return r;
  }();
  return registry;
}

void ForecasterRegistry::add(const std::string& kind, ForecasterFactory factory) {
  factories_[kind] = std::move(factory);
}

bool ForecasterRegistry::contains(const std::string& kind) const {
  return factories_.count(kind) != 0;
}

std::unique_ptr<Forecaster> ForecasterRegistry::create(const std::string& kind,
                                                       std::size_t order) const {
  const auto it = factories_.find(kind);
  if (it == factories_.end()) throw std::invalid_argument("unknown forecaster '" + kind + "'");
  return it->second(order);
}

std::vector<std::string> ForecasterRegistry::kinds() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : factories_) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------------------
// Models

double SampleAndHold::forecast(std::span<const double> series, std::size_t h) const {
  if (h < 1) throw std::invalid_argument("forecast: horizon must be >= 1");
  if (series.empty()) throw std::invalid_argument("forecast: empty series");
  return series.back();
}

ArCoefficients fit_ar(std::span<const double> series, std::size_t order) {
  if (order < 1) throw std::invalid_argument("fit_ar: order must be >= 1");
  if (series.size() < order + 1) {
    throw std::invalid_argument("fit_ar: series of length " + std::to_string(series.size()) +
                                " too short for AR(" + std::to_string(order) + ")");
  }
  const auto rows = static_cast<Eigen::Index>(series.size() - order);
  const auto cols = static_cast<Eigen::Index>(order + 1);
  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t t = order + static_cast<std::size_t>(r);
    y(r) = series[t];
    x(r, 0) = 1.0;
    for (std::size_t l = 1; l <= order; ++l) x(r, static_cast<Eigen::Index>(l)) = series[t - l];
  }

  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
  const Eigen::VectorXd beta = cod.solve(y);

  ArCoefficients out;
  bool ok = beta.allFinite();
  if (ok && cod.rank() < cols) {
    const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
    ok = (x * beta - y).cwiseAbs().maxCoeff() <= 1e-9 * scale;
  }
  if (!ok) {
    out.fallback = true;
    return out;
  }
  out.intercept = beta(0);
  out.phi.resize(order);
  for (std::size_t l = 0; l < order; ++l) out.phi[l] = beta(static_cast<Eigen::Index>(l + 1));
  return out;
}

double forecast_ar(const ArCoefficients& model, std::span<const double> series, std::size_t h) {
  if (h < 1) throw std::invalid_argument("forecast: horizon must be >= 1");
  if (series.empty()) throw std::invalid_argument("forecast: empty series");
  if (model.fallback) return series.back();
  const std::size_t p = model.phi.size();
  if (series.size() < p) throw std::invalid_argument("forecast: series shorter than AR order");
  // lags[0] is the most recent value.
  std::vector<double> lags(series.end() - static_cast<std::ptrdiff_t>(p), series.end());
  std::reverse(lags.begin(), lags.end());
  double next = series.back();
  for (std::size_t step = 0; step < h; ++step) {
    next = model.intercept;
    for (std::size_t l = 0; l < p; ++l) next += model.phi[l] * lags[l];
    if (p > 0) {
      std::rotate(lags.rbegin(), lags.rbegin() + 1, lags.rend());
      lags[0] = next;
    }
  }
  return next;
}

AutoRegressive::AutoRegressive(std::size_t order) : order_(order) {
  if (order < 1) throw std::invalid_argument("AR order must be >= 1");
}

void AutoRegressive::fit(std::span<const double> series) {
  model_ = fit_ar(series, order_);
  trained_ = true;
}

double AutoRegressive::forecast(std::span<const double> series, std::size_t h) const {
  if (!trained_) throw std::logic_error("AR model used before fit");
  return forecast_ar(model_, series, h);
}

// ---------------------------------------------------------------------------
// Snapshots, membership, offsets

SnapshotWindow::SnapshotWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("SnapshotWindow: capacity must be positive");
}

void SnapshotWindow::push(Snapshot s) {
  if (!window_.empty() && s.t <= window_.back().t) {
    throw std::invalid_argument("SnapshotWindow: steps must strictly increase");
  }
  if (window_.size() == capacity_) window_.pop_front();
  window_.push_back(std::move(s));
}

const Snapshot& SnapshotWindow::back(std::size_t ago) const {
  if (ago >= window_.size()) throw std::out_of_range("SnapshotWindow: lookback too far");
  return window_[window_.size() - 1 - ago];
}

std::vector<std::int32_t> predict_membership(const clustering::PartitionHistory& history,
                                             std::size_t m_prime) {
  if (history.empty()) throw std::invalid_argument("predict_membership: empty history");
  const std::size_t span = std::min(m_prime + 1, history.size());
  const std::size_t n = history.back().assignment.size();
  const std::size_t k = history.back().k;
  std::vector<std::int32_t> out(n);
  std::vector<std::size_t> counts(k);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t a = 0; a < span; ++a) {
      ++counts[static_cast<std::size_t>(history.back(a).assignment[i])];
    }
    const std::size_t top = *std::max_element(counts.begin(), counts.end());
    // Most recent label among the tied maxima.
    for (std::size_t a = 0; a < span; ++a) {
      const std::int32_t label = history.back(a).assignment[i];
      if (counts[static_cast<std::size_t>(label)] == top) {
        out[i] = label;
        break;
      }
    }
  }
  return out;
}

std::int32_t nearest_centroid(std::span<const double> z, const Matrix& centroids) {
  if (z.size() != centroids.cols()) throw std::invalid_argument("nearest_centroid: dim mismatch");
  std::int32_t label = 0;
  double d2 = 0.0;
  kernels::active().assign_nearest(z.data(), 1, centroids.values().data(), centroids.rows(),
                                   z.size(), &label, &d2);
  return label;
}

std::vector<double> adjusted_point(std::span<const double> z, std::int32_t j,
                                   const Matrix& centroids, double alpha) {
  const auto c = centroids.row(static_cast<std::size_t>(j));
  std::vector<double> p(z.size());
  for (std::size_t r = 0; r < z.size(); ++r) p[r] = c[r] + alpha * (z[r] - c[r]);
  return p;
}

AlphaClamp alpha_clamp(std::span<const double> z, std::int32_t j, const Matrix& centroids) {
  if (z.size() != centroids.cols()) throw std::invalid_argument("alpha_clamp: dim mismatch");
  if (j < 0 || static_cast<std::size_t>(j) >= centroids.rows()) {
    throw std::invalid_argument("alpha_clamp: label out of range");
  }
  if (nearest_centroid(z, centroids) == j) return {1.0, false};

  const auto uj = static_cast<std::size_t>(j);
  const auto cj = centroids.row(uj);
  // A lower-indexed duplicate of c_j claims every point cluster j could.
  for (std::size_t k = 0; k < uj; ++k) {
    const auto ck = centroids.row(k);
    if (std::equal(ck.begin(), ck.end(), cj.begin())) return {1.0, true};
  }

  const std::size_t dim = z.size();
  std::vector<double> v(dim);
  for (std::size_t r = 0; r < dim; ++r) v[r] = z[r] - cj[r];
  double alpha = 1.0;
  for (std::size_t k = 0; k < centroids.rows(); ++k) {
    if (k == uj) continue;
    const auto ck = centroids.row(k);
    double vd = 0.0;
    double dd = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
      const double dk = ck[r] - cj[r];
      vd += v[r] * dk;
      dd += dk * dk;
    }
    if (vd > 0.0) alpha = std::min(alpha, dd / (2.0 * vd));
  }

  // The closed form lands on a bisector; step inward until rounding and
  // the tie rule agree that the point belongs to j.
  int retreats = 0;
  while (alpha > 0.0) {
    if (nearest_centroid(adjusted_point(z, j, centroids, alpha), centroids) == j) {
      return {alpha, false};
    }
    alpha = ++retreats <= 64 ? std::nextafter(alpha, 0.0) : alpha * 0.5;
  }
  return {1.0, true};
}

std::vector<double> offset(std::size_t node, std::int32_t j, const SnapshotWindow& window,
                           std::size_t m_prime) {
  if (window.empty()) throw std::invalid_argument("offset: empty window");
  const std::size_t terms = std::min(m_prime + 1, window.size());
  const std::size_t dim = window.back().stored.cols();
  std::vector<double> sum(dim, 0.0);
  for (std::size_t a = 0; a < terms; ++a) {
    const Snapshot& s = window.back(a);
    const auto z = s.stored.row(node);
    const auto c = s.centroids.row(static_cast<std::size_t>(j));
    const double alpha = alpha_clamp(z, j, s.centroids).alpha;
    for (std::size_t r = 0; r < dim; ++r) sum[r] += alpha * (z[r] - c[r]);
  }
  for (double& v : sum) v /= static_cast<double>(terms);
  return sum;
}

// ---------------------------------------------------------------------------
// Bank

ForecastBank::ForecastBank(std::string kind, std::size_t order, std::size_t k, std::size_t dims,
                           std::int64_t w_init, std::int64_t w_retrain,
                           const ForecasterRegistry& registry)
    : kind_(std::move(kind)),
      order_(order),
      k_(k),
      dims_(dims),
      w_init_(w_init),
      w_retrain_(w_retrain),
      registry_(registry) {
  if (!registry_.contains(kind_)) throw std::invalid_argument("unknown forecaster '" + kind_ + "'");
  if (w_init_ < 1) throw std::invalid_argument("w_init must be >= 1");
  if (w_retrain_ < 1) throw std::invalid_argument("w_retrain must be >= 1");
  series_.resize(k_ * dims_);
  for (std::size_t j = 0; j < k_; ++j) {
    for (std::size_t r = 0; r < dims_; ++r) {
      series_[j * dims_ + r].cluster = static_cast<std::int32_t>(j);
      series_[j * dims_ + r].resource = std::to_string(r);
    }
  }
  for (std::size_t m = 0; m < k_ * dims_; ++m) models_.push_back(registry_.create(kind_, order_));
}

void ForecastBank::observe(std::int64_t t, const Matrix& centroids) {
  if (centroids.rows() != k_ || centroids.cols() != dims_) {
    throw std::invalid_argument("ForecastBank: centroid shape mismatch");
  }
  for (std::size_t j = 0; j < k_; ++j) {
    for (std::size_t r = 0; r < dims_; ++r) {
      auto& s = series_[j * dims_ + r];
      if (s.values.empty()) s.start_t = t;
      s.values.push_back(centroids(j, r));
    }
  }
  const bool due = t == w_init_ || (t > w_init_ && (t - w_init_) % w_retrain_ == 0);
  if (!due) return;
  for (std::size_t m = 0; m < models_.size(); ++m) models_[m]->fit(series_[m].values);
  trained_at_ = t;
}

std::size_t ForecastBank::fallback_count() const {
  return static_cast<std::size_t>(
      std::count_if(models_.begin(), models_.end(), [](const auto& m) { return m->fell_back(); }));
}

double ForecastBank::forecast(std::size_t cluster, std::size_t dim, std::size_t h) const {
  const auto& s = series_.at(cluster * dims_ + dim);
  if (!trained()) {
    if (h < 1) throw std::invalid_argument("forecast: horizon must be >= 1");
    return s.values.back();
  }
  return models_[cluster * dims_ + dim]->forecast(s.values, h);
}

const CentroidSeries& ForecastBank::series(std::size_t cluster, std::size_t dim) const {
  return series_.at(cluster * dims_ + dim);
}

std::vector<ForecastRecord> forecast_nodes(std::int64_t t, std::span<const std::size_t> horizons,
                                           const ForecastBank& bank,
                                           const clustering::PartitionHistory& history,
                                           const SnapshotWindow& window, std::size_t m_prime) {
  if (history.empty() || window.empty()) throw std::invalid_argument("forecast_nodes: no history");
  const std::vector<std::int32_t> membership = predict_membership(history, m_prime);
  const Snapshot& now = window.back();
  const std::size_t n = now.stored.rows();
  const std::size_t dim = now.stored.cols();
  const std::size_t k = now.centroids.rows();

  Matrix offsets(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = offset(i, membership[i], window, m_prime);
    std::copy(s.begin(), s.end(), offsets.row(i).begin());
  }

  std::vector<ForecastRecord> out;
  out.reserve(horizons.size());
  for (std::size_t h : horizons) {
    ForecastRecord rec;
    rec.t = t;
    rec.h = h;
    rec.membership = membership;
    rec.offsets = offsets;
    rec.centroid_forecasts = Matrix(k, dim);
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t r = 0; r < dim; ++r) rec.centroid_forecasts(j, r) = bank.forecast(j, r, h);
    }
    rec.node_forecasts = Matrix(n, dim);
    rec.clamped = Matrix(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = static_cast<std::size_t>(membership[i]);
      for (std::size_t r = 0; r < dim; ++r) {
        const double x = rec.centroid_forecasts(j, r) + offsets(i, r);
        rec.node_forecasts(i, r) = x;
        rec.clamped(i, r) = std::clamp(x, 0.0, 1.0);
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace monisum::forecasting
