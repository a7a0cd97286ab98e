// Copyright 2026 The DAGC Authors. All Rights Reserved.
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
// =============================================================================

#include <cmath>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dagc/alloc.hpp"
#include "dagc/config.hpp"
#include "dagc/error.hpp"
#include "dagc/experiment.hpp"

namespace {

using namespace dagc;

WeightVector weights_from(const std::string& arg) {
  std::vector<double> w = experiment::parse_weights_arg(arg);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12 && total > 0.0) {
    for (double& v : w) v /= total;
  }
  try {
    return WeightVector(std::move(w));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

int alloc_ratio(const std::string& weights_arg, double mean_ratio) {
  const WeightVector w = weights_from(weights_arg);
  if (!(mean_ratio > 0.0 && mean_ratio < 1.0)) {
    throw ConfigError("--mean-ratio = " + std::to_string(mean_ratio) + " out of range: must be in (0, 1)");
  }
  const auto trace = alloc::dagc_r_trace(w, mean_ratio);
  train::AllocationRecord record;
  record.strategy = "dagc_r";
  record.kind = "ratio";
  record.weights = w.values();
  record.values = trace.best.ratios();
  record.mean = mean_ratio;
  std::cout << experiment::allocation_json(record) << '\n';
  return 0;
}

int alloc_threshold(const std::string& weights_arg, double mean_threshold) {
  const WeightVector w = weights_from(weights_arg);
  if (!(mean_threshold > 0.0)) {
    throw ConfigError("--mean-threshold = " + std::to_string(mean_threshold) + " out of range: must be > 0");
  }
  const auto thresholds = alloc::dagc_a(w, mean_threshold);
  train::AllocationRecord record;
  record.strategy = "dagc_a";
  record.kind = "threshold";
  record.weights = w.values();
  record.values = thresholds.thresholds();
  record.mean = mean_threshold;
  std::cout << experiment::allocation_json(record) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-aware gradient compression simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::size_t seeds = 1;
  auto* run = app.add_subcommand("run", "Train one config or a preset and write metrics");
  auto* config_opt = run->add_option("--config", config_path, "Experiment config file");
  run->add_option("--preset", preset, "Named preset: motivating-logistic, sweep-sr")->excludes(config_opt);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seeds", seeds, "Number of seeds expanded from the master seed")->check(CLI::PositiveNumber);

  double target = 0.0;
  std::string baseline;
  std::vector<std::string> csvs;
  auto* compare = app.add_subcommand("compare", "Iterations to a target accuracy, relative to a baseline run");
  compare->add_option("--target", target, "Target test accuracy")->required()->check(CLI::Range(0.0, 1.0));
  compare->add_option("--baseline", baseline, "Run name used as the reference")->required();
  compare->add_option("csv", csvs, "metrics.csv files")->required()->expected(2, -1);

  std::string weights_arg;
  double mean_ratio = 0.0;
  auto* alloc_r = app.add_subcommand("alloc", "Ratio allocation for relative compressors");
  alloc_r->add_option("--weights", weights_arg, "Comma list or file of weights")->required();
  alloc_r->add_option("--mean-ratio", mean_ratio, "Mean compression ratio")->required();

  double mean_threshold = 0.0;
  auto* alloc_a = app.add_subcommand("alloc-a", "Threshold allocation for hard-threshold compressors");
  alloc_a->add_option("--weights", weights_arg, "Comma list or file of weights")->required();
  alloc_a->add_option("--mean-threshold", mean_threshold, "Harmonic-mean threshold")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) {
      if (preset.empty() == config_path.empty()) {
        std::cerr << "run: give exactly one of --config or --preset\n";
        return experiment::kConfigError;
      }
      if (!preset.empty()) return experiment::run_preset(preset, out_dir, seeds, std::cerr);
      train::TrainConfig config;
      try {
        config = config::parse_config(config_path);
      } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return experiment::kIoError;
      }
      return experiment::run_command(config, out_dir, seeds, std::cerr);
    }
    if (*compare) {
      std::vector<std::filesystem::path> paths(csvs.begin(), csvs.end());
      const auto rows = experiment::compare_runs(paths, target, baseline);
      std::cout << experiment::format_compare(rows, target, baseline);
      return 0;
    }
    if (*alloc_r) return alloc_ratio(weights_arg, mean_ratio);
    if (*alloc_a) return alloc_threshold(weights_arg, mean_threshold);
  } catch (const BudgetInfeasibleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return experiment::kBudgetInfeasible;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return experiment::kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return experiment::kConfigError;
  }
  return 0;
}
