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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "monisum/forecasting.hpp"

using namespace monisum;
using namespace monisum::forecasting;

namespace {

clustering::Partition labels_at(std::int64_t t, std::size_t k, std::vector<std::int32_t> labels) {
  clustering::Partition p;
  p.t = t;
  p.k = k;
  p.assignment = std::move(labels);
  p.centroids = Matrix(k, 1);
  return p;
}

Snapshot snapshot_1d(std::int64_t t, std::vector<double> stored, std::vector<double> centroids) {
  Snapshot s{t, Matrix(stored.size(), 1), Matrix(centroids.size(), 1)};
  for (std::size_t i = 0; i < stored.size(); ++i) s.stored(i, 0) = stored[i];
  for (std::size_t j = 0; j < centroids.size(); ++j) s.centroids(j, 0) = centroids[j];
  return s;
}

// Brute-force nearest centroid with ties to the lowest index.
std::int32_t nearest_oracle(std::span<const double> z, const Matrix& c) {
  std::int32_t best = 0;
  double best_d = INFINITY;
  for (std::size_t k = 0; k < c.rows(); ++k) {
    double d = 0;
    for (std::size_t r = 0; r < z.size(); ++r) d += (z[r] - c(k, r)) * (z[r] - c(k, r));
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::int32_t>(k);
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("forecasting") {
  TEST_CASE("sample and hold returns the latest value") {
    SampleAndHold f;
    const std::vector<double> s = {0.1, 0.3, 0.42};
    for (std::size_t h : {1u, 5u, 50u}) CHECK(f.forecast(s, h) == 0.42);
  }

  TEST_CASE("AR(1) on a constant series forecasts the constant") {
    const std::vector<double> s(30, 0.37);
    AutoRegressive ar(1);
    ar.fit(s);
    CHECK(!ar.fell_back());
    for (std::size_t h : {1u, 3u, 10u}) CHECK(ar.forecast(s, h) == doctest::Approx(0.37).epsilon(1e-12));
  }

  TEST_CASE("AR(1) recovers a noiseless recursion") {
    std::vector<double> s = {0.9};
    for (int t = 1; t < 40; ++t) s.push_back(0.5 * s.back() + 0.1);
    const auto m = fit_ar(s, 1);
    CHECK(!m.fallback);
    CHECK(std::abs(m.phi[0] - 0.5) < 1e-6);
    CHECK(std::abs(m.intercept - 0.1) < 1e-6);
  }

  TEST_CASE("AR(2) coefficient recovery") {
    std::vector<double> s = {0.3, 0.7};
    for (int t = 2; t < 200; ++t) s.push_back(0.2 + 1.2 * s[t - 1] - 0.5 * s[t - 2]);
    const auto m = fit_ar(s, 2);
    CHECK(std::abs(m.intercept - 0.2) < 1e-6);
    CHECK(std::abs(m.phi[0] - 1.2) < 1e-6);
    CHECK(std::abs(m.phi[1] + 0.5) < 1e-6);
  }

  TEST_CASE("AR fit needs enough data") {
    const std::vector<double> one = {0.5};
    CHECK_THROWS(fit_ar(one, 3));
    AutoRegressive ar(3);
    CHECK_THROWS(ar.fit(one));
  }

  TEST_CASE("AR recursion iterates on its own forecasts") {
    ArCoefficients m;
    m.intercept = 0.0;
    m.phi = {0.5};
    const std::vector<double> s = {0.1, 0.8};
    CHECK(forecast_ar(m, s, 1) == doctest::Approx(0.4));
    CHECK(forecast_ar(m, s, 2) == doctest::Approx(0.2));
  }

  TEST_CASE("AR(3) on a period-50 sinusoid") {
    auto x = [](double t) { return 0.5 + 0.3 * std::sin(2 * std::numbers::pi * t / 50.0); };
    std::vector<double> s;
    for (int t = 0; t < 400; ++t) s.push_back(x(t));
    AutoRegressive ar(3);
    ar.fit(s);
    CHECK(!ar.fell_back());
    const double f = ar.forecast(s, 1);
    CHECK(std::abs(f - x(400)) / std::abs(x(400)) < 0.05);
  }

  TEST_CASE("registry") {
    auto& reg = ForecasterRegistry::global();
    CHECK(reg.contains("sample-and-hold"));
    CHECK(reg.contains("ar"));
    CHECK(reg.create("ar", 2)->kind() == "ar");
    CHECK_THROWS(reg.create("nope", 1));
    ForecasterRegistry local;
    local.add("hold", [](std::size_t) { return std::make_unique<SampleAndHold>(); });
    CHECK(local.contains("hold"));
    CHECK(!local.contains("ar"));
  }

  TEST_CASE("membership prediction") {
    clustering::PartitionHistory h(8);
    const std::vector<std::int32_t> seq = {1, 1, 1, 2, 2, 2};
    for (std::size_t t = 0; t < seq.size(); ++t) {
      h.push(labels_at(static_cast<std::int64_t>(t + 1), 3, {seq[t], 2, 0}));
    }
    const auto five = predict_membership(h, 5);
    CHECK(five[0] == 2);  // 3-3 tie, most recent wins
    CHECK(five[1] == 2);  // unanimous
    CHECK(predict_membership(h, 0)[0] == 2);
    h.push(labels_at(7, 3, {0, 2, 0}));
    CHECK(predict_membership(h, 0)[0] == 0);
    CHECK(predict_membership(h, 2)[0] == 2);
  }

  TEST_CASE("alpha clamp examples") {
    Matrix c(2, 1);
    c(0, 0) = 0.0;
    c(1, 0) = 1.0;
    const std::vector<double> inside = {0.2};
    CHECK(alpha_clamp(inside, 0, c).alpha == 1.0);
    const std::vector<double> at = {0.0};
    CHECK(alpha_clamp(at, 0, c).alpha == 1.0);
    CHECK(adjusted_point(at, 0, c, 1.0)[0] == 0.0);

    const std::vector<double> z = {0.9};
    const auto a = alpha_clamp(z, 0, c);
    CHECK(a.alpha == doctest::Approx(0.5 / 0.9).epsilon(1e-12));
    CHECK(adjusted_point(z, 0, c, a.alpha)[0] == doctest::Approx(0.5).epsilon(1e-12));
    // Fine scan: every alpha up to the clamp stays in cluster 0, beyond it leaves.
    for (int s = 1; s <= 1000; ++s) {
      const double alpha = s / 1000.0;
      const auto p = adjusted_point(z, 0, c, alpha);
      CHECK((nearest_oracle(p, c) == 0) == (alpha <= a.alpha));
    }
  }

  TEST_CASE("adjusted points land in their cluster") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> grid(0, 4);
    for (int trial = 0; trial < 3000; ++trial) {
      const std::size_t k = 2 + trial % 4, dim = 1 + trial % 3;
      const bool coarse = trial % 3 == 0;
      Matrix c(k, dim);
      for (double& x : c.values()) x = coarse ? grid(rng) * 0.25 : u(rng);
      std::vector<double> z(dim);
      for (double& x : z) x = coarse ? grid(rng) * 0.25 : u(rng);
      const auto j = static_cast<std::int32_t>(trial % k);
      const auto a = alpha_clamp(z, j, c);
      REQUIRE(a.alpha > 0.0);
      REQUIRE(a.alpha <= 1.0);
      if (a.degenerate) continue;
      REQUIRE(nearest_oracle(adjusted_point(z, j, c, a.alpha), c) == j);
      REQUIRE(nearest_centroid(z, c) == nearest_oracle(z, c));
    }
  }

  TEST_CASE("offset examples") {
    SnapshotWindow w(4);
    w.push(snapshot_1d(1, {0.5}, {0.5, 0.9}));
    w.push(snapshot_1d(2, {0.5}, {0.5, 0.9}));
    CHECK(offset(0, 0, w, 1)[0] == 0.0);

    SnapshotWindow one(2);
    one.push(snapshot_1d(1, {0.6}, {0.5, 1.0}));
    CHECK(offset(0, 0, one, 0)[0] == doctest::Approx(0.1));

    SnapshotWindow two(3);
    two.push(snapshot_1d(1, {0.3}, {0.0, 0.3}));  // deviation 0.3, alpha 0.5
    two.push(snapshot_1d(2, {0.6}, {0.5, 1.0}));  // deviation 0.1, alpha 1
    CHECK(offset(0, 0, two, 1)[0] == doctest::Approx(0.125));
    // Lookback truncated to the available snapshots.
    CHECK(offset(0, 0, two, 10)[0] == doctest::Approx(0.125));
  }

  TEST_CASE("forecast bank schedule") {
    ForecastBank bank("ar", 1, 1, 1, 5, 3);
    Matrix c(1, 1);
    for (std::int64_t t = 1; t <= 4; ++t) {
      c(0, 0) = 0.1 * static_cast<double>(t);
      bank.observe(t, c);
      CHECK(!bank.trained());
      CHECK(bank.forecast(0, 0, 3) == c(0, 0));  // sample-and-hold before training
    }
    std::vector<std::int64_t> trained;
    for (std::int64_t t = 5; t <= 15; ++t) {
      c(0, 0) = 0.1 + 0.01 * static_cast<double>(t % 3);
      const auto before = bank.trained_at();
      bank.observe(t, c);
      if (bank.trained_at() != before) trained.push_back(t);
    }
    CHECK(trained == std::vector<std::int64_t>{5, 8, 11, 14});
    CHECK(bank.series(0, 0).values.size() == 15);
    CHECK_THROWS(ForecastBank("nope", 1, 1, 1, 5, 3));
  }

  TEST_CASE("single cluster at its centroid forecasts the centroid") {
    clustering::PartitionHistory h(4);
    h.push(labels_at(1, 1, {0, 0}));
    SnapshotWindow w(4);
    w.push(snapshot_1d(1, {0.4, 0.4}, {0.4}));
    ForecastBank bank("sample-and-hold", 1, 1, 1, 10, 10);
    Matrix c(1, 1);
    c(0, 0) = 0.4;
    bank.observe(1, c);
    const std::vector<std::size_t> hs = {1, 5};
    const auto recs = forecast_nodes(1, hs, bank, h, w, 5);
    REQUIRE(recs.size() == 2);
    for (const auto& r : recs) {
      CHECK(r.node_forecasts(0, 0) == 0.4);
      CHECK(r.node_forecasts(1, 0) == 0.4);
    }
  }

  TEST_CASE("forecast decomposes into centroid plus offset") {
    clustering::PartitionHistory h(8);
    SnapshotWindow w(6);
    ForecastBank bank("ar", 2, 2, 1, 4, 2);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 0.2);
    for (std::int64_t t = 1; t <= 12; ++t) {
      const std::vector<double> stored = {0.1 + u(rng), 0.15 + u(rng), 0.8 + u(rng), 0.85 + u(rng)};
      h.push(labels_at(t, 2, {0, 0, 1, 1}));
      const std::vector<double> cents = {(stored[0] + stored[1]) / 2, (stored[2] + stored[3]) / 2};
      w.push(snapshot_1d(t, stored, cents));
      Matrix c(2, 1);
      c(0, 0) = cents[0];
      c(1, 0) = cents[1];
      bank.observe(t, c);
      const std::vector<std::size_t> hs = {1, 3};
      for (const auto& r : forecast_nodes(t, hs, bank, h, w, 3)) {
        for (std::size_t i = 0; i < 4; ++i) {
          const auto j = static_cast<std::size_t>(r.membership[i]);
          REQUIRE(r.node_forecasts(i, 0) == r.centroid_forecasts(j, 0) + r.offsets(i, 0));
          REQUIRE(r.clamped(i, 0) == std::clamp(r.node_forecasts(i, 0), 0.0, 1.0));
        }
      }
    }
  }

  TEST_CASE("constant centroids forecast the constant") {
    clustering::PartitionHistory h(8);
    SnapshotWindow w(6);
    ForecastBank bank("ar", 3, 1, 1, 6, 3);
    Matrix c(1, 1);
    c(0, 0) = 0.55;
    for (std::int64_t t = 1; t <= 20; ++t) {
      h.push(labels_at(t, 1, {0, 0, 0}));
      w.push(snapshot_1d(t, {0.55, 0.55, 0.55}, {0.55}));
      bank.observe(t, c);
      const std::vector<std::size_t> hs = {1, 10};
      for (const auto& r : forecast_nodes(t, hs, bank, h, w, 5)) {
        for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(r.node_forecasts(i, 0) - 0.55) < 1e-6);
      }
    }
  }
}
