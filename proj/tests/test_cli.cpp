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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "monisum/trace.hpp"

namespace fs = std::filesystem;
using monisum::cli::dispatch;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const char* base = std::getenv("MONISUM_TEST_TMP");
  auto dir = (base ? fs::path(base) : fs::temp_directory_path()) / ("cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool single_line(const std::string& s) {
  return !s.empty() && s.find('\n') == s.size() - 1;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("gen writes a trace") {
    const auto dir = scratch("gen");
    const auto path = (dir / "trace.csv").string();
    const auto r = call({"gen", "--nodes", "50", "--steps", "10000", "--groups", "3", "--seed", "1",
                         "-o", path});
    CHECK(r.code == 0);
    const auto ds = monisum::load_csv(path);
    CHECK(ds.n_nodes == 50);
    CHECK(ds.n_steps == 10000);
  }

  TEST_CASE("run with config and overrides") {
    const auto dir = scratch("run");
    const auto trace = (dir / "trace.csv").string();
    REQUIRE(call({"gen", "--nodes", "10", "--steps", "300", "--resources", "2", "-o", trace}).code == 0);
    {
      std::ofstream cfg(dir / "c.cfg");
      cfg << "budget = 0.2\nk = 2\nw_init = 100\nhorizons = 0,1\nmax_horizon = 1\n";
    }
    const auto out = (dir / "out").string();
    const auto r = call({"run", "--config", (dir / "c.cfg").string(), "--trace", trace, "-o", out,
                         "--budget", "0.4"});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    for (const char* f : {"manifest", "metrics.csv", "aggregate.csv", "frequencies.csv"}) {
      CHECK(fs::exists(fs::path(out) / f));
    }
    const auto manifest = slurp(fs::path(out) / "manifest");
    CHECK(manifest.find("budget = 0.40000000000000002") != std::string::npos);  // flag beats file
    CHECK(manifest.find("k = 2\n") != std::string::npos);                        // file beats default

    // The manifest alone reproduces the run.
    const auto again = (dir / "again").string();
    CHECK(call({"run", "--config", (fs::path(out) / "manifest").string(), "--trace", trace, "-o",
                again}).code == 0);
    CHECK(slurp(fs::path(out) / "metrics.csv") == slurp(fs::path(again) / "metrics.csv"));
  }

  TEST_CASE("missing trace is a runtime error naming the file") {
    const auto dir = scratch("missing");
    const auto r = call({"run", "--trace", "missing.csv", "-o", (dir / "o").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("missing.csv") != std::string::npos);
    CHECK(single_line(r.err));
  }

  TEST_CASE("usage errors") {
    auto r = call({"run", "--trace", "x.csv", "-o", "o", "--bogus", "1"});
    CHECK(r.code == 2);
    CHECK(single_line(r.err));
    CHECK(call({}).code == 2);
    CHECK(call({"frobnicate"}).code == 2);
    CHECK(call({"gen", "--nodes", "abc", "-o", "x"}).code == 2);
    CHECK(call({"sweep", "--trace", "x.csv", "-o", "o", "--axis", "B", "--values", "0.1,zz"}).code == 2);
  }

  TEST_CASE("invalid config is reported") {
    const auto dir = scratch("badcfg");
    const auto trace = (dir / "trace.csv").string();
    REQUIRE(call({"gen", "--nodes", "5", "--steps", "50", "-o", trace}).code == 0);
    {
      std::ofstream cfg(dir / "c.cfg");
      cfg << "budget = 2\n";
    }
    const auto r = call({"run", "--config", (dir / "c.cfg").string(), "--trace", trace, "-o",
                         (dir / "o").string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("budget") != std::string::npos);
    CHECK(single_line(r.err));
  }

  TEST_CASE("help per subcommand") {
    for (const char* sub : {"gen", "run", "sweep", "monitor", "corr"}) {
      const auto r = call({sub, "--help"});
      CHECK(r.code == 0);
      CHECK(r.out.find("Usage") != std::string::npos);
    }
    CHECK(call({"--help"}).code == 0);
  }

  TEST_CASE("sweep monitor and corr") {
    const auto dir = scratch("misc");
    const auto trace = (dir / "trace.csv").string();
    REQUIRE(call({"gen", "--nodes", "9", "--steps", "400", "-o", trace}).code == 0);
    auto r = call({"sweep", "--trace", trace, "-o", (dir / "sw").string(), "--axis", "B", "--values",
                   "0.2,0.6", "--winit", "100"});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "sw" / "sweep.csv"));
    r = call({"monitor", "--trace", trace, "-o", (dir / "mon").string(), "--k", "3", "--train-len",
              "200", "--test-len", "200"});
    CHECK(r.code == 0);
    CHECK(slurp(dir / "mon" / "monitor.csv").rfind("resource,rmse\n", 0) == 0);
    r = call({"corr", "--trace", trace, "-o", (dir / "corr").string()});
    CHECK(r.code == 0);
    const auto cdf = slurp(dir / "corr" / "corr_cdf.csv");
    CHECK(cdf.rfind("value,cdf\n", 0) == 0);
    CHECK(std::count(cdf.begin(), cdf.end(), '\n') == 1 + 9 * 8 / 2);
  }

#ifdef MONISUM_TOOL_PATH
  TEST_CASE("scalar and vector kernels produce identical metrics") {
    const auto dir = scratch("isa");
    const std::string tool = MONISUM_TOOL_PATH;
    const auto trace = (dir / "trace.csv").string();
    REQUIRE(call({"gen", "--nodes", "20", "--steps", "600", "--resources", "2", "-o", trace}).code == 0);
    const std::string common = " run --trace " + trace + " --winit 200 --forecaster ar --k 4 -o ";
    REQUIRE(std::system(("MONISUM_SIMD=scalar " + tool + common + (dir / "s").string()).c_str()) == 0);
    REQUIRE(std::system((tool + common + (dir / "v").string()).c_str()) == 0);
    CHECK(slurp(dir / "s" / "metrics.csv") == slurp(dir / "v" / "metrics.csv"));
    CHECK(slurp(dir / "s" / "aggregate.csv") == slurp(dir / "v" / "aggregate.csv"));
  }
#endif
}
