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
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "monisum/clustering.hpp"
#include "monisum/matrix.hpp"

namespace monisum::forecasting {

/// Centroid values of one (cluster, resource) pair, one per step since start.
struct CentroidSeries {
  std::int32_t cluster = 0;
  std::string resource;
  std::int64_t start_t = 1;
  std::vector<double> values;
};

// ---------------------------------------------------------------------------
// Forecaster contract

/// A time-series model over a centroid series. fit() sees the full history
/// at (re)training time; forecast() sees the full history up to the issue
/// step, so models update their transient state from the latest values
/// without refitting.
class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual std::string kind() const = 0;
  virtual void fit(std::span<const double> series) = 0;
  virtual double forecast(std::span<const double> series, std::size_t h) const = 0;
  /// True when fitting degraded the model to sample-and-hold.
  virtual bool fell_back() const { return false; }
};

using ForecasterFactory = std::function<std::unique_ptr<Forecaster>(std::size_t order)>;

/// Kind-keyed factory table. Built-ins: "sample-and-hold" and "ar".
class ForecasterRegistry {
 public:
  static ForecasterRegistry& global();

  void add(const std::string& kind, ForecasterFactory factory);
  bool contains(const std::string& kind) const;
  std::unique_ptr<Forecaster> create(const std::string& kind, std::size_t order) const;
  std::vector<std::string> kinds() const;

 private:
  std::map<std::string, ForecasterFactory> factories_;
};

/// Intercept plus lag coefficients of x_t = c + sum_l phi_l x_{t-l}.
struct ArCoefficients {
  double intercept = 0.0;
  std::vector<double> phi;
  bool fallback = false;
};

/// Ordinary least squares on the lag matrix. A rank-deficient system is
/// kept (minimum-norm solution) only if it reproduces the data exactly;
/// otherwise the fit is marked as a sample-and-hold fallback.
ArCoefficients fit_ar(std::span<const double> series, std::size_t order);

/// Iterates the recursion h times, feeding forecasts back as lags.
double forecast_ar(const ArCoefficients& model, std::span<const double> series, std::size_t h);

class SampleAndHold final : public Forecaster {
 public:
  std::string kind() const override { return "sample-and-hold"; }
  void fit(std::span<const double>) override {}
  double forecast(std::span<const double> series, std::size_t h) const override;
};

class AutoRegressive final : public Forecaster {
 public:
  explicit AutoRegressive(std::size_t order);
  std::string kind() const override { return "ar"; }
  void fit(std::span<const double> series) override;
  double forecast(std::span<const double> series, std::size_t h) const override;
  bool fell_back() const override { return model_.fallback; }
  const ArCoefficients& coefficients() const { return model_; }

 private:
  std::size_t order_;
  ArCoefficients model_;
  bool trained_ = false;
};

// ---------------------------------------------------------------------------
// Spatial side: membership, offsets

/// Stored values and per-label value centroids of one step. Centroids live in
/// the same space as the stored values (the current-step slice when
/// clustering features are windowed).
struct Snapshot {
  std::int64_t t = 0;
  Matrix stored;     // N x D
  Matrix centroids;  // K x D
};

class SnapshotWindow {
 public:
  explicit SnapshotWindow(std::size_t capacity);
  void push(Snapshot s);
  std::size_t size() const { return window_.size(); }
  bool empty() const { return window_.empty(); }
  const Snapshot& back(std::size_t ago = 0) const;

 private:
  std::size_t capacity_;
  std::deque<Snapshot> window_;
};

/// Modal label of each node over the last m_prime + 1 partitions (fewer if
/// history is shorter). Ties go to whichever tied label the node held most
/// recently.
std::vector<std::int32_t> predict_membership(const clustering::PartitionHistory& history,
                                             std::size_t m_prime);

/// Index of the nearest centroid, ties to the lowest index.
std::int32_t nearest_centroid(std::span<const double> z, const Matrix& centroids);

struct AlphaClamp {
  double alpha = 1.0;
  bool degenerate = false;  // cluster j has no region of its own
};

/// Largest alpha in (0, 1] such that c_j + alpha (z - c_j) is still nearest
/// to c_j under the lowest-index tie rule.
AlphaClamp alpha_clamp(std::span<const double> z, std::int32_t j, const Matrix& centroids);

/// The adjusted point c_j + alpha (z - c_j).
std::vector<double> adjusted_point(std::span<const double> z, std::int32_t j,
                                   const Matrix& centroids, double alpha);

/// Mean over the last min(m_prime + 1, window.size()) steps of
/// alpha * (z_i - c_j) for node i against label j.
std::vector<double> offset(std::size_t node, std::int32_t j, const SnapshotWindow& window,
                           std::size_t m_prime);

/// Per-node forecast issued at t for t + h.
struct ForecastRecord {
  std::int64_t t = 0;
  std::size_t h = 0;
  Matrix centroid_forecasts;              // K x D
  std::vector<std::int32_t> membership;   // predicted label per node
  Matrix offsets;                         // N x D
  Matrix node_forecasts;                  // N x D, centroid + offset
  Matrix clamped;                         // node_forecasts clipped to [0, 1]
};

/// Owns one model per (cluster, dimension), the centroid series they train
/// on, and the retraining schedule. Before the first training (at step
/// w_init) every forecast is sample-and-hold.
class ForecastBank {
 public:
  ForecastBank(std::string kind, std::size_t order, std::size_t k, std::size_t dims,
               std::int64_t w_init, std::int64_t w_retrain,
               const ForecasterRegistry& registry = ForecasterRegistry::global());

  /// Appends step t's centroids (K x D) and (re)trains when scheduled.
  void observe(std::int64_t t, const Matrix& centroids);

  bool trained() const { return trained_at_ > 0; }
  std::int64_t trained_at() const { return trained_at_; }
  std::size_t fallback_count() const;

  double forecast(std::size_t cluster, std::size_t dim, std::size_t h) const;
  const CentroidSeries& series(std::size_t cluster, std::size_t dim) const;

 private:
  std::string kind_;
  std::size_t order_;
  std::size_t k_;
  std::size_t dims_;
  std::int64_t w_init_;
  std::int64_t w_retrain_;
  const ForecasterRegistry& registry_;
  std::vector<CentroidSeries> series_;
  std::vector<std::unique_ptr<Forecaster>> models_;
  std::int64_t trained_at_ = 0;
};

/// Composes membership prediction, offsets and centroid forecasts for every
/// requested horizon (each >= 1).
std::vector<ForecastRecord> forecast_nodes(std::int64_t t, std::span<const std::size_t> horizons,
                                           const ForecastBank& bank,
                                           const clustering::PartitionHistory& history,
                                           const SnapshotWindow& window, std::size_t m_prime);

}  // namespace monisum::forecasting
