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

#include <sstream>

#include "monisum/config.hpp"

using namespace monisum;

TEST_SUITE("config") {
  TEST_CASE("defaults are valid") {
    ExperimentConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.evaluated_horizons().size() == 11);
  }

  TEST_CASE("parse key value lines") {
    std::istringstream in(
        "# comment\n"
        "budget = 0.5\n"
        "k=4\n"
        "horizons = 0, 2, 20\n"
        "forecaster = ar\n"
        "transmitter = uniform\n"
        "clustering = min-distance\n"
        "run.trace_steps = 100\n"
        "result.objective.cpu = 0.1\n"
        "version = monisum 0.1.0\n");
    const auto c = parse_config(in);
    CHECK(c.budget == 0.5);
    CHECK(c.k == 4);
    CHECK(c.horizons == std::vector<std::size_t>{0, 2, 20});
    CHECK(c.forecaster == "ar");
    CHECK(c.transmitter == TransmitterKind::kUniform);
    CHECK(c.clustering == ClusteringKind::kMinDistance);
    const auto hs = c.evaluated_horizons();
    CHECK(hs.back() == 20);
  }

  TEST_CASE("bad input is rejected") {
    ExperimentConfig c;
    CHECK_THROWS(apply_setting(c, "nonsense", "1"));
    CHECK_THROWS(apply_setting(c, "k", "three"));
    CHECK_THROWS(apply_setting(c, "budget", "0.3x"));
    std::istringstream no_eq("budget 0.3\n");
    CHECK_THROWS(parse_config(no_eq));
    c.budget = 0;
    CHECK_THROWS(c.validate());
    c = {};
    c.k = 0;
    CHECK_THROWS(c.validate());
  }

  TEST_CASE("written config parses back to the same settings") {
    ExperimentConfig c;
    c.budget = 0.1 + 0.2;
    c.gamma = 0.6;
    c.forecaster = "ar";
    c.window = 3;
    c.clustering_mode = FeatureMode::kJoint;
    c.similarity = clustering::SimilarityMeasure::kJaccard;
    c.std_mode = evaluation::StdMode::kPerNode;
    c.seed = 12345678901234ULL;
    std::stringstream buf;
    write_config(buf, c);
    const auto back = parse_config(buf);
    CHECK(to_settings(back) == to_settings(c));
    CHECK(back.budget == c.budget);
  }
}
