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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "monisum/pipeline.hpp"

using namespace monisum;
using namespace monisum::pipeline;

namespace {

TraceDataset synthetic(std::size_t n, std::size_t steps, std::size_t d = 1, double noise = 0.01,
                       std::uint64_t seed = 1) {
  SyntheticSpec spec;
  spec.n_nodes = n;
  spec.n_steps = steps;
  spec.n_resources = d;
  spec.noise_std = noise;
  spec.seed = seed;
  return generate_synthetic(spec).dataset;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.w_init = 50;
  c.w_retrain = 25;
  c.horizons = {0, 1, 5};
  c.max_horizon = 5;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const char* base = std::getenv("MONISUM_TEST_TMP");
  auto dir = (base ? std::filesystem::path(base) : std::filesystem::temp_directory_path()) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("resource groups") {
    CHECK(resource_groups(FeatureMode::kScalar, 2) == std::vector<std::vector<std::size_t>>{{0}, {1}});
    CHECK(resource_groups(FeatureMode::kJoint, 2) == std::vector<std::vector<std::size_t>>{{0, 1}});
  }

  TEST_CASE("full information on a constant trace gives zero error everywhere") {
    TraceDataset ds = synthetic(6, 120);
    for (double& v : ds.values) v = 0.35;
    auto c = small_config();
    c.budget = 1.0;
    c.k = 6;
    const auto r = run(c, ds);
    for (const auto& m : r.metrics) CHECK(m.rmse == 0.0);
    CHECK(r.objective.at("r0") == 0.0);
    CHECK(r.intermediate_rmse.at("r0") == 0.0);
  }

  TEST_CASE("budget one keeps the stored view fresh") {
    auto c = small_config();
    c.budget = 1.0;
    const auto r = run(c, synthetic(10, 150, 2));
    for (const auto& m : r.metrics) {
      if (m.h == 0) CHECK(m.rmse == 0.0);
    }
    for (double f : r.frequencies) CHECK(f == 1.0);
  }

  TEST_CASE("empirical frequencies track the budget") {
    auto c = small_config();
    const auto r = run(c, synthetic(20, 2000));
    for (double f : r.frequencies) CHECK(std::abs(f - 0.3) <= 0.03);
    for (std::size_t i = 0; i < r.frequencies.size(); ++i) {
      CHECK(r.budget_slack[i] == doctest::Approx(r.frequencies[i] - 0.3));
    }
  }

  TEST_CASE("metrics cover every step and horizon") {
    auto c = small_config();
    const auto ds = synthetic(8, 200, 2);
    const auto r = run(c, ds);
    std::size_t h0 = 0, h5 = 0;
    for (const auto& m : r.metrics) {
      h0 += m.h == 0;
      h5 += m.h == 5;
    }
    CHECK(h0 == 200 * 2);
    CHECK(h5 == (200 - 5) * 2);
    for (const auto& a : r.aggregates) {
      if (a.h >= 1) CHECK(a.steps == std::size_t(200 - c.w_init + 1 - a.h));
      else CHECK(a.steps == 200);
    }
    double obj2 = 0;
    for (const auto& a : r.aggregates) {
      if (a.resource == "cpu") obj2 += a.objective_contrib;
    }
    CHECK(std::sqrt(obj2) == doctest::Approx(r.objective.at("cpu")));
  }

  TEST_CASE("argument checks") {
    auto c = small_config();
    CHECK_THROWS(run(c, synthetic(8, 40)));  // shorter than warm-up plus horizon
    c.k = 9;
    CHECK_THROWS(run(c, synthetic(8, 200)));
  }

  TEST_CASE("every clustering and feature mode runs") {
    const auto ds = synthetic(12, 160, 2);
    for (auto kind : {ClusteringKind::kDynamic, ClusteringKind::kStatic, ClusteringKind::kMinDistance}) {
      for (auto mode : {FeatureMode::kScalar, FeatureMode::kJoint}) {
        for (std::size_t window : {1u, 3u}) {
          auto c = small_config();
          c.clustering = kind;
          c.clustering_mode = mode;
          c.window = window;
          c.forecaster = "ar";
          const auto r = run(c, ds);
          CHECK(r.offline == (kind == ClusteringKind::kStatic));
          for (const auto& [res, v] : r.objective) CHECK(std::isfinite(v));
        }
      }
    }
    auto c = small_config();
    c.transmitter = TransmitterKind::kUniform;
    c.budget = 0.25;
    const auto r = run(c, ds);
    for (double f : r.frequencies) CHECK(f == doctest::Approx(0.25).epsilon(0.02));
  }

  TEST_CASE("decisions and forecasts never see future measurements") {
    const auto ds = synthetic(15, 200, 2);
    auto perturbed = ds;
    const std::size_t cut = 120;
    for (std::size_t t = cut; t < ds.n_steps; ++t) {
      for (std::size_t i = 0; i < ds.n_nodes; ++i) {
        for (std::size_t r = 0; r < 2; ++r) perturbed.at(t, i, r) = 1.0 - ds.at(t, i, r);
      }
    }
    auto c = small_config();
    c.forecaster = "ar";
    OnlineSimulator a(c, 15, 2), b(c, 15, 2);
    for (std::size_t s = 0; s < cut; ++s) {
      const auto ra = a.step(ds.step(s));
      const auto rb = b.step(perturbed.step(s));
      REQUIRE(ra.transmitted == rb.transmitted);
      for (std::size_t p = 0; p < ra.pipelines.size(); ++p) {
        REQUIRE(ra.pipelines[p].partition->assignment == rb.pipelines[p].partition->assignment);
        REQUIRE(ra.pipelines[p].forecasts.size() == rb.pipelines[p].forecasts.size());
        for (std::size_t f = 0; f < ra.pipelines[p].forecasts.size(); ++f) {
          REQUIRE(ra.pipelines[p].forecasts[f].node_forecasts == rb.pipelines[p].forecasts[f].node_forecasts);
        }
      }
    }
    // h = 0 metrics for steps before the cut agree too.
    const auto r1 = run(c, ds), r2 = run(c, perturbed);
    for (std::size_t i = 0; i < r1.metrics.size(); ++i) {
      const auto& m = r1.metrics[i];
      if (m.h == 0 && m.t <= static_cast<std::int64_t>(cut)) CHECK(m.rmse == r2.metrics[i].rmse);
    }
  }

  TEST_CASE("identical runs write identical files") {
    const auto ds = synthetic(10, 200, 2);
    auto c = small_config();
    c.forecaster = "ar";
    c.dump_assignments = true;
    c.dump_forecasts = true;
    const auto d1 = scratch("det1"), d2 = scratch("det2");
    write_outputs(run(c, ds), c, ds, d1);
    write_outputs(run(c, ds), c, ds, d2);
    for (const char* f : {"metrics.csv", "aggregate.csv", "frequencies.csv", "assignments.csv",
                          "forecasts.csv", "manifest"}) {
      REQUIRE(std::filesystem::exists(d1 / f));
      CHECK(slurp(d1 / f) == slurp(d2 / f));
    }
    CHECK(slurp(d1 / "metrics.csv").rfind("t,h,resource,rmse\n", 0) == 0);
    CHECK(slurp(d1 / "aggregate.csv").rfind("h,resource,time_avg_rmse,objective_contrib\n", 0) == 0);
  }

  TEST_CASE("manifest reproduces the run") {
    const auto ds = synthetic(10, 200);
    auto c = small_config();
    c.budget = 0.4;
    c.k = 2;
    const auto dir = scratch("manifest");
    write_outputs(run(c, ds), c, ds, dir);
    const auto back = load_config(dir / "manifest");
    CHECK(to_settings(back) == to_settings(c));
  }

  TEST_CASE("monitor mode endpoints") {
    auto c = small_config();
    TraceDataset same = synthetic(6, 100);
    for (std::size_t t = 0; t < 100; ++t) {
      for (std::size_t i = 1; i < 6; ++i) same.at(t, i, 0) = same.at(t, 0, 0);
    }
    c.k = 2;
    CHECK(monitor_mode(c, same, 50, 50).rmse.at("r0") == 0.0);

    const auto ds = synthetic(9, 100, 1, 0.02);
    c.k = 9;
    CHECK(monitor_mode(c, ds, 50, 50).rmse.at("r0") == 0.0);
    c.clustering = ClusteringKind::kMinDistance;
    CHECK(monitor_mode(c, ds, 50, 50).rmse.at("r0") == 0.0);
  }

  TEST_CASE("monitor mode with separated groups breaks only after a switch") {
    auto ds = synthetic(9, 200, 1, 0.0);
    auto c = small_config();
    c.k = 3;
    CHECK(monitor_mode(c, ds, 100, 100).rmse.at("r0") == 0.0);
    // Node 0 joins node 1's group from step 150 on.
    const auto mon = monitor_mode(c, ds, 100, 50);
    CHECK(mon.rmse.at("r0") == 0.0);
    for (std::size_t t = 150; t < 200; ++t) ds.at(t, 0, 0) = ds.at(t, 1, 0);
    CHECK(monitor_mode(c, ds, 100, 50).rmse.at("r0") == 0.0);
    CHECK(monitor_mode(c, ds, 100, 100).rmse.at("r0") > 0.0);
    c.clustering = ClusteringKind::kStatic;
    CHECK_THROWS(monitor_mode(c, ds, 100, 100));
    c.clustering = ClusteringKind::kDynamic;
    CHECK_THROWS(monitor_mode(c, ds, 150, 100));
  }

  TEST_CASE("budget sweep lowers staleness") {
    const auto ds = synthetic(12, 600);
    auto c = small_config();
    const std::vector<double> bs = {0.1, 0.2, 0.3, 0.5, 0.7, 1.0};
    const auto rows = sweep(c, SweepAxis::kBudget, bs, ds);
    std::vector<double> h0;
    for (const auto& r : rows) {
      if (r.h == 0) h0.push_back(r.time_avg_rmse);
    }
    REQUIRE(h0.size() == bs.size());
    for (std::size_t i = 1; i < h0.size(); ++i) CHECK(h0[i] <= h0[i - 1] + 1e-3);
    CHECK(h0.back() == 0.0);
  }

  TEST_CASE("cluster-count sweep reaches zero at one cluster per node") {
    const auto ds = synthetic(8, 200);
    auto c = small_config();
    c.budget = 1.0;
    const std::vector<double> ks = {1, 2, 3, 8};
    const auto rows = sweep(c, SweepAxis::kK, ks, ds);
    CHECK(rows.back().value == 8);
    CHECK(rows.back().intermediate_rmse == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rows.front().intermediate_rmse > 0.0);
  }

  TEST_CASE("horizon sweep grows with the horizon") {
    const auto ds = synthetic(12, 1000);
    auto c = small_config();
    const std::vector<double> hs = {1, 5, 10, 50};
    const auto rows = sweep(c, SweepAxis::kHorizon, hs, ds);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].time_avg_rmse >= rows[i - 1].time_avg_rmse);
    CHECK_THROWS(sweep(c, SweepAxis::kK, std::vector<double>{1.5}, ds));
    CHECK(parse_axis("Mprime") == SweepAxis::kMPrime);
    CHECK(parse_axis("M'") == SweepAxis::kMPrime);
    CHECK_THROWS(parse_axis("Z"));
  }

  TEST_CASE("sweep csv") {
    const auto ds = synthetic(8, 200);
    auto c = small_config();
    const auto rows = sweep(c, SweepAxis::kM, std::vector<double>{1, 2}, ds);
    const auto dir = scratch("sweep");
    write_sweep_csv(rows, dir / "sweep.csv");
    CHECK(slurp(dir / "sweep.csv").rfind("axis,value,h,resource,", 0) == 0);
  }
}
