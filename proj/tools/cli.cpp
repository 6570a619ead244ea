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

#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "monisum/config.hpp"
#include "monisum/evaluation.hpp"
#include "monisum/pipeline.hpp"
#include "monisum/trace.hpp"

namespace monisum::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Experiment flags and the config keys they override.
const std::vector<std::pair<std::string, std::string>> kOverrideFlags = {
    {"budget", "budget"},       {"k", "k"},
    {"m", "m"},                 {"mprime", "m_prime"},
    {"horizons", "horizons"},   {"window", "window"},
    {"forecaster", "forecaster"}, {"order", "order"},
    {"winit", "w_init"},        {"wretrain", "w_retrain"},
    {"transmitter", "transmitter"}, {"clustering", "clustering"},
    {"seed", "seed"},           {"train-len", "train_len"},
    {"test-len", "test_len"},
};

struct ExperimentArgs {
  std::string config_path;
  std::string trace_path;
  std::string out_dir;
  std::map<std::string, std::string> overrides;  // config key -> value
  std::vector<std::string> sets;                 // raw key=value
};

void add_experiment_options(CLI::App* cmd, ExperimentArgs& a, bool with_out = true) {
  cmd->add_option("--config", a.config_path, "Config file (key = value lines)");
  cmd->add_option("--trace", a.trace_path, "Trace CSV")->required();
  if (with_out) cmd->add_option("-o,--out", a.out_dir, "Output directory")->required();
  for (const auto& [flag, key] : kOverrideFlags) {
    const std::string k = key;
    cmd->add_option_function<std::string>(
        "--" + flag, [&a, k](const std::string& v) { a.overrides[k] = v; },
        "Override config key '" + key + "'");
  }
  cmd->add_option("--set", a.sets, "Override any config key: --set key=value");
}

ExperimentConfig merged_config(const ExperimentArgs& a) {
  ExperimentConfig cfg;
  if (!a.config_path.empty()) {
    if (!fs::exists(a.config_path)) throw std::runtime_error("config file not found: " + a.config_path);
    cfg = load_config(a.config_path);
  }
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [k, v] : a.overrides) apply_setting(cfg, k, v);
  cfg.validate();
  return cfg;
}

TraceDataset read_trace(const std::string& path) {
  if (!fs::exists(path)) throw std::runtime_error("trace file not found: " + path);
  return load_csv(path);
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void write_manifest(const fs::path& dir, const ExperimentConfig& cfg, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
  auto out = open_out(dir / "manifest");
  out << "# reproduce with: monisum " << command << " --config <this file> --trace <trace>\n";
  out << "version = " << pipeline::version_string() << '\n';
  write_config(out, cfg);
  for (const auto& [k, v] : extra) out << k << " = " << v << '\n';
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--values: not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("--values must list at least one value");
  return out;
}

std::size_t resource_index(const TraceDataset& ds, const std::string& name) {
  for (std::size_t r = 0; r < ds.n_resources; ++r) {
    if (ds.resource_names[r] == name) return r;
  }
  throw std::runtime_error("trace has no resource '" + name + "'");
}

// Keeps a message on a single line.
std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Budget-constrained monitoring simulator", "monisum"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pipeline::version_string());

  // gen
  SyntheticSpec spec;
  std::string gen_out;
  int digits = CsvWriteOptions{}.significant_digits;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic trace");
  gen->add_option("--nodes", spec.n_nodes, "Number of nodes");
  gen->add_option("--steps", spec.n_steps, "Number of time steps");
  gen->add_option("--resources", spec.n_resources, "Resources per node");
  gen->add_option("--groups", spec.n_groups, "Latent groups");
  gen->add_option("--seed", spec.seed, "Random seed");
  gen->add_option("--switch-prob", spec.switch_probability, "Per-step group switch probability");
  gen->add_option("--noise", spec.noise_std, "Per-node noise std");
  std::optional<double> amplitude, walk_step, walk_bound, jump_size;
  gen->add_option("--amplitude", amplitude, "Sinusoid amplitude");
  gen->add_option("--walk-step", walk_step, "Random-walk step std");
  gen->add_option("--walk-bound", walk_bound, "Random-walk bound");
  gen->add_option("--jump-prob", spec.jump_probability, "Per-step level jump probability");
  gen->add_option("--jump-size", jump_size, "Level jump size");
  gen->add_option("--period", spec.base_period, "Base sinusoid period");
  gen->add_option("--step-seconds", spec.step_seconds, "Seconds per step");
  gen->add_option("--digits", digits, "Significant digits in the CSV")->check(CLI::Range(1, 17));
  gen->add_option("-o,--out", gen_out, "Output CSV")->required();

  ExperimentArgs run_args, sweep_args, monitor_args;
  auto* run = app.add_subcommand("run", "Run the online pipeline on a trace");
  add_experiment_options(run, run_args);

  std::string axis, values;
  auto* sw = app.add_subcommand("sweep", "Run once per value of one parameter");
  add_experiment_options(sw, sweep_args);
  sw->add_option("--axis", axis, "B, K, h, M or Mprime")->required();
  sw->add_option("--values", values, "Comma-separated values")->required();

  auto* mon = app.add_subcommand("monitor", "Train/test monitor-selection mode");
  add_experiment_options(mon, monitor_args);

  std::string corr_trace, corr_out, corr_resource;
  auto* corr = app.add_subcommand("corr", "Pairwise-correlation CDF of a trace");
  corr->add_option("--trace", corr_trace, "Trace CSV")->required();
  corr->add_option("--resource", corr_resource, "Resource name (default: first)");
  corr->add_option("-o,--out", corr_out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << pipeline::version_string() << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kUsageError;
  }

  try {
    if (*gen) {
      if (amplitude) spec.amplitude = *amplitude;
      if (walk_step) spec.walk_step = *walk_step;
      if (walk_bound) spec.walk_bound = *walk_bound;
      if (jump_size) spec.jump_size = *jump_size;
      const auto trace = generate_synthetic(spec);
      if (fs::path(gen_out).has_parent_path()) fs::create_directories(fs::path(gen_out).parent_path());
      write_csv(trace.dataset, gen_out, CsvWriteOptions{digits});
    } else if (*run) {
      const auto cfg = merged_config(run_args);
      const auto ds = read_trace(run_args.trace_path);
      const auto result = pipeline::run(cfg, ds);
      pipeline::write_outputs(result, cfg, ds, run_args.out_dir);
    } else if (*sw) {
      const auto cfg = merged_config(sweep_args);
      const auto ax = pipeline::parse_axis(axis);
      const auto vals = parse_values(values);
      const auto ds = read_trace(sweep_args.trace_path);
      const auto rows = pipeline::sweep(cfg, ax, vals, ds);
      const fs::path dir = sweep_args.out_dir;
      pipeline::write_sweep_csv(rows, dir / "sweep.csv");
      write_manifest(dir, cfg, "sweep", {{"run.axis", pipeline::to_string(ax)}, {"run.values", values}});
    } else if (*mon) {
      const auto cfg = merged_config(monitor_args);
      const auto ds = read_trace(monitor_args.trace_path);
      const auto result = pipeline::monitor_mode(cfg, ds, cfg.train_len, cfg.test_len);
      const fs::path dir = monitor_args.out_dir;
      auto csv = open_out(dir / "monitor.csv");
      csv << "resource,rmse\n";
      for (const auto& [r, v] : result.rmse) csv << r << ',' << num(v) << '\n';
      std::vector<std::pair<std::string, std::string>> extra;
      for (std::size_t g = 0; g < result.monitors.size(); ++g) {
        std::string ids;
        for (std::size_t j = 0; j < result.monitors[g].size(); ++j) {
          ids += (j ? "," : "") + ds.node_ids[static_cast<std::size_t>(result.monitors[g][j])];
        }
        extra.emplace_back("result.monitors." + std::to_string(g), ids);
      }
      write_manifest(dir, cfg, "monitor", extra);
    } else if (*corr) {
      const auto ds = read_trace(corr_trace);
      const std::size_t r = corr_resource.empty() ? 0 : resource_index(ds, corr_resource);
      const auto cdf = evaluation::correlation_cdf(ds, r);
      auto csv = open_out(fs::path(corr_out) / "corr_cdf.csv");
      csv << "value,cdf\n";
      for (std::size_t i = 0; i < cdf.values.size(); ++i) {
        csv << num(cdf.values[i]) << ',' << num(cdf.cdf[i]) << '\n';
      }
      if (cdf.excluded_constant > 0) {
        err << "note: excluded " << cdf.excluded_constant << " constant series\n";
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kRuntimeError;
  }
  return kOk;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace monisum::cli
