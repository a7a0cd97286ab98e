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

// Run orchestration, presets and iteration-to-target comparisons.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dagc/train.hpp"

namespace dagc::experiment {

enum ExitCode : int { kOk = 0, kConfigError = 1, kBudgetInfeasible = 2, kIoError = 3 };

/// Master seed expanded to k run seeds: seed, seed + 1, ..., seed + k - 1.
std::vector<std::uint64_t> expand_seeds(std::uint64_t master, std::size_t count);

/// Writes metrics.csv, allocation.json, partition.json and
/// config.resolved.toml for one finished run.
void write_run(const train::TrainConfig& config, const train::RunMetrics& metrics, const std::filesystem::path& dir);

/// Runs config once (seeds == 1) or once per expanded seed into
/// out_dir/seed-<k>/ plus out_dir/seeds.json. Errors are reported on err
/// and mapped to ExitCode.
int run_command(const train::TrainConfig& config, const std::filesystem::path& out_dir, std::size_t seeds,
                std::ostream& err);

struct NamedConfig {
  std::string name;
  train::TrainConfig config;
};

/// "motivating-logistic": one large and ten small workers, hand-tuned
/// schemes against uniform Top-k. "sweep-sr": skew ratios 10, 100, 1000
/// against dagc_r, uniform_topk and accordion_r.
std::vector<NamedConfig> preset(const std::string& name);
std::vector<std::string> preset_names();

/// Every preset run into out_dir/<run name>/.
int run_preset(const std::string& name, const std::filesystem::path& out_dir, std::size_t seeds, std::ostream& err);

/// First eval iteration with test accuracy >= target.
std::optional<std::size_t> iterations_to_target(std::span<const train::MetricsRow> rows, double target);

/// (baseline - run) / baseline * 100; undefined when either is missing or
/// the baseline is zero.
std::optional<double> savings_percent(std::optional<double> run, std::optional<double> baseline);

/// Median of per-seed values; a seed that never reached the target counts
/// as +infinity, so the median itself may be "not reached".
std::optional<double> median_iterations(std::span<const std::optional<std::size_t>> per_seed);

/// Run name of a metrics file: its directory name, skipping seed-<k>
/// directories.
std::string run_name(const std::filesystem::path& csv);

struct CompareRow {
  std::string name;
  std::size_t seeds = 0;
  std::optional<double> median_iterations;
  std::optional<double> savings;
  double median_final_accuracy = 0.0;
};

std::vector<CompareRow> compare_runs(std::span<const std::filesystem::path> csvs, double target,
                                     const std::string& baseline);
std::string format_compare(std::span<const CompareRow> rows, double target, const std::string& baseline);

/// JSON text for an allocation record.
std::string allocation_json(const train::AllocationRecord& record);

/// Parses allocation.json and re-checks the budget invariants (ratio sum
/// or harmonic mean); throws std::invalid_argument when they fail.
train::AllocationRecord load_allocation_json(const std::filesystem::path& path);
train::AllocationRecord parse_allocation_json(const std::string& text);

/// "0.5,0.3,0.2" or a path to a file of numbers separated by commas or
/// whitespace.
std::vector<double> parse_weights_arg(const std::string& arg);

}  // namespace dagc::experiment
