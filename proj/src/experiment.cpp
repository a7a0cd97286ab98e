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

#include "dagc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dagc/alloc.hpp"
#include "dagc/config.hpp"
#include "dagc/error.hpp"

namespace dagc::experiment {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using train::TrainConfig;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

bool is_seed_dir(const std::string& name) {
  return name.size() > 5 && name.rfind("seed-", 0) == 0 &&
         name.find_first_not_of("0123456789", 5) == std::string::npos;
}

// Shared settings of the desk-scale reproductions.
TrainConfig desk_base() {
  TrainConfig c;
  c.dataset.samples = 5000;
  c.dataset.test_samples = 1000;
  c.dataset.features = 50;
  c.dataset.classes = 10;
  c.dataset.centroid_scale = 0.5;
  c.alpha = 0.5;
  c.arch = model::Architecture::softmax_regression;
  c.lr = 0.1;
  c.batch = 32;
  c.iterations = 2000;
  c.eval_interval = 10;
  c.rounding = train::Rounding::carry;
  c.seed = 1;
  return c;
}

int guarded(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return kOk;
  } catch (const BudgetInfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kBudgetInfeasible;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kIoError;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace

std::vector<std::uint64_t> expand_seeds(std::uint64_t master, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t k = 0; k < count; ++k) seeds[k] = master + k;
  return seeds;
}

void write_run(const TrainConfig& config, const train::RunMetrics& metrics, const fs::path& dir) {
  make_dir(dir);
  train::write_metrics_csv(dir / "metrics.csv", metrics);
  write_text(dir / "allocation.json", allocation_json(metrics.allocation) + "\n");
  write_text(dir / "partition.json", data::partition_to_json(metrics.partition) + "\n");
  write_text(dir / "config.resolved.toml", config::to_toml(config));
}

int run_command(const TrainConfig& config, const fs::path& out_dir, std::size_t seeds, std::ostream& err) {
  return guarded(err, [&] {
    if (seeds == 0) throw ConfigError("--seeds must be at least 1");
    config.validate();
    if (seeds == 1) {
      write_run(config, train::run_dsgd(config), out_dir);
      return;
    }
    make_dir(out_dir);
    json record = {{"master_seed", config.seed}, {"runs", json::array()}};
    const auto expanded = expand_seeds(config.seed, seeds);
    for (std::size_t k = 0; k < expanded.size(); ++k) {
      TrainConfig run = config;
      run.seed = expanded[k];
      const std::string sub = "seed-" + std::to_string(k + 1);
      write_run(run, train::run_dsgd(run), out_dir / sub);
      record["runs"].push_back({{"dir", sub}, {"seed", expanded[k]}});
    }
    write_text(out_dir / "seeds.json", record.dump(2) + "\n");
  });
}

std::vector<std::string> preset_names() { return {"motivating-logistic", "sweep-sr"}; }

std::vector<NamedConfig> preset(const std::string& name) {
  std::vector<NamedConfig> runs;
  if (name == "motivating-logistic") {
    TrainConfig base = desk_base();
    base.workers = 11;
    base.weight_source = train::WeightSource::dichotomous;
    base.p_large = 0.5;

    TrainConfig scheme_i = base;
    scheme_i.strategy = train::Strategy::manual;
    scheme_i.manual_ratios.assign(11, 0.0001);
    scheme_i.manual_ratios[0] = 0.01;

    TrainConfig uniform = base;
    uniform.strategy = train::Strategy::uniform_topk;
    uniform.mean_ratio = 0.001;

    TrainConfig scheme_ii = base;
    scheme_ii.strategy = train::Strategy::manual;
    scheme_ii.manual_ratios.assign(11, 0.0011);
    scheme_ii.manual_ratios[0] = 0.0001;

    runs = {{"scheme_I", scheme_i}, {"uniform", uniform}, {"scheme_II", scheme_ii}};
  } else if (name == "sweep-sr") {
    for (double sr : {10.0, 100.0, 1000.0}) {
      for (auto strategy : {train::Strategy::dagc_r, train::Strategy::uniform_topk, train::Strategy::accordion_r}) {
        TrainConfig c = desk_base();
        c.workers = 10;
        c.weight_source = train::WeightSource::skew_ratio;
        c.skew_ratio = sr;
        c.strategy = strategy;
        c.mean_ratio = 0.001;
        char label[64];
        std::snprintf(label, sizeof label, "sr%g-%s", sr, train::to_string(strategy).c_str());
        runs.push_back({label, c});
      }
    }
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (expected one of: " + known + ")");
  }
  return runs;
}

int run_preset(const std::string& name, const fs::path& out_dir, std::size_t seeds, std::ostream& err) {
  std::vector<NamedConfig> runs;
  const int status = guarded(err, [&] { runs = preset(name); });
  if (status != kOk) return status;
  for (const auto& run : runs) {
    const int code = run_command(run.config, out_dir / run.name, seeds, err);
    if (code != kOk) return code;
  }
  return kOk;
}

std::optional<std::size_t> iterations_to_target(std::span<const train::MetricsRow> rows, double target) {
  for (const auto& row : rows) {
    if (row.test_accuracy >= target) return row.iteration;
  }
  return std::nullopt;
}

std::optional<double> savings_percent(std::optional<double> run, std::optional<double> baseline) {
  if (!run || !baseline || *baseline == 0.0) return std::nullopt;
  return (*baseline - *run) / *baseline * 100.0;
}

std::optional<double> median_iterations(std::span<const std::optional<std::size_t>> per_seed) {
  if (per_seed.empty()) return std::nullopt;
  std::vector<double> values;
  for (const auto& v : per_seed) {
    values.push_back(v ? static_cast<double>(*v) : std::numeric_limits<double>::infinity());
  }
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  const double median = m % 2 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
  if (std::isinf(median)) return std::nullopt;
  return median;
}

std::string run_name(const fs::path& csv) {
  fs::path dir = csv.parent_path();
  while (!dir.empty() && is_seed_dir(dir.filename().string())) dir = dir.parent_path();
  std::string name = dir.filename().string();
  return name.empty() ? csv.stem().string() : name;
}

std::vector<CompareRow> compare_runs(std::span<const fs::path> csvs, double target, const std::string& baseline) {
  if (csvs.size() < 2) throw std::invalid_argument("compare needs at least two metrics files");
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::optional<std::size_t>>> reached;
  std::map<std::string, std::vector<double>> final_acc;
  for (const auto& path : csvs) {
    const auto rows = train::read_metrics_csv(path);
    if (rows.empty()) throw std::runtime_error(path.string() + ": no metric rows");
    const std::string name = run_name(path);
    if (!reached.count(name)) order.push_back(name);
    reached[name].push_back(iterations_to_target(rows, target));
    final_acc[name].push_back(rows.back().test_accuracy);
  }
  if (!reached.count(baseline)) throw std::invalid_argument("baseline run '" + baseline + "' not among the inputs");

  std::vector<CompareRow> table;
  for (const auto& name : order) {
    CompareRow row;
    row.name = name;
    row.seeds = reached[name].size();
    row.median_iterations = median_iterations(reached[name]);
    auto acc = final_acc[name];
    std::sort(acc.begin(), acc.end());
    const std::size_t m = acc.size();
    row.median_final_accuracy = m % 2 ? acc[m / 2] : 0.5 * (acc[m / 2 - 1] + acc[m / 2]);
    table.push_back(row);
  }
  const auto base = median_iterations(reached[baseline]);
  for (auto& row : table) row.savings = savings_percent(row.median_iterations, base);
  return table;
}

std::string format_compare(std::span<const CompareRow> rows, double target, const std::string& baseline) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "target accuracy %.4g, baseline %s\n", target, baseline.c_str());
  out << buf;
  std::snprintf(buf, sizeof buf, "%-28s %6s %14s %12s %10s\n", "run", "seeds", "iterations", "savings", "final_acc");
  out << buf;
  for (const auto& row : rows) {
    std::string iters = "not reached";
    if (row.median_iterations) {
      std::snprintf(buf, sizeof buf, "%.1f", *row.median_iterations);
      iters = buf;
    }
    std::string savings = "undefined";
    if (row.savings) {
      std::snprintf(buf, sizeof buf, "%.1f%%", *row.savings);
      savings = buf;
    }
    std::snprintf(buf, sizeof buf, "%-28s %6zu %14s %12s %10.4f\n", row.name.c_str(), row.seeds, iters.c_str(),
                  savings.c_str(), row.median_final_accuracy);
    out << buf;
  }
  return out.str();
}

std::string allocation_json(const train::AllocationRecord& record) {
  const bool relative = record.kind == "ratio" || record.kind == "adaptive_ratio";
  json j = {{"strategy", record.strategy},
            {"kind", record.kind},
            {"weights", record.weights},
            {relative ? "ratios" : "thresholds", record.values},
            {relative ? "mean_ratio" : "mean_threshold", record.mean},
            {"skew_ratio", record.skew_ratio()}};
  if (record.aggressive) j["aggressive"] = *record.aggressive;
  if (record.conservative) j["conservative"] = *record.conservative;
  return j.dump(2);
}

train::AllocationRecord parse_allocation_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("allocation.json: ") + e.what());
  }
  train::AllocationRecord r;
  try {
    r.strategy = j.at("strategy").get<std::string>();
    r.kind = j.at("kind").get<std::string>();
    r.weights = j.at("weights").get<std::vector<double>>();
    const bool relative = r.kind == "ratio" || r.kind == "adaptive_ratio";
    r.values = j.at(relative ? "ratios" : "thresholds").get<std::vector<double>>();
    r.mean = j.at(relative ? "mean_ratio" : "mean_threshold").get<double>();
    if (j.contains("aggressive")) r.aggressive = j["aggressive"].get<double>();
    if (j.contains("conservative")) r.conservative = j["conservative"].get<double>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("allocation.json: ") + e.what());
  }
  validate_weights(r.weights);
  if (r.values.size() != r.weights.size()) throw std::invalid_argument("allocation.json: values and weights differ in length");
  if (r.kind == "ratio") {
    alloc::RatioAllocation check(r.values, r.mean);
    for (double v : r.values) {
      if (v > 1.0) throw std::invalid_argument("allocation.json: ratio above 1");
    }
  } else if (r.kind == "threshold") {
    alloc::ThresholdAllocation check(r.values, r.mean);
  } else if (r.kind != "adaptive_ratio" && r.kind != "adaptive_threshold") {
    throw std::invalid_argument("allocation.json: unknown kind '" + r.kind + "'");
  }
  return r;
}

train::AllocationRecord load_allocation_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_allocation_json(buffer.str());
}

std::vector<double> parse_weights_arg(const std::string& arg) {
  std::string text = arg;
  std::error_code ec;
  if (fs::is_regular_file(arg, ec)) {
    std::ifstream in(arg, std::ios::binary);
    if (!in) throw IoError("cannot open " + arg);
    std::stringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::vector<double> weights;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw ConfigError("weights: '" + token + "' is not a number");
    weights.push_back(v);
  }
  if (weights.empty()) throw ConfigError("weights: empty list");
  return weights;
}

}  // namespace dagc::experiment
