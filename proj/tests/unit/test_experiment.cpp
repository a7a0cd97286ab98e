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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dagc/config.hpp"
#include "dagc/error.hpp"
#include "dagc/experiment.hpp"

namespace dagc::experiment {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dagc_test_experiment_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_csv(const fs::path& path, const std::vector<std::pair<std::size_t, double>>& acc) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << "iter,loss,acc,elements_total,elements_w1\n";
  for (const auto& [it, a] : acc) out << it << ",1.0," << a << ",0,0\n";
}

train::TrainConfig tiny() {
  train::TrainConfig c;
  c.dataset.samples = 300;
  c.dataset.test_samples = 100;
  c.dataset.features = 8;
  c.dataset.classes = 3;
  c.workers = 3;
  c.strategy = train::Strategy::dagc_r;
  c.mean_ratio = 0.1;
  c.iterations = 20;
  c.eval_interval = 5;
  c.batch = 8;
  c.threads = 1;
  return c;
}

TEST(SavingsTest, Values) {
  EXPECT_DOUBLE_EQ(*savings_percent(400.0, 500.0), 20.0);
  EXPECT_DOUBLE_EQ(*savings_percent(600.0, 500.0), -20.0);
  EXPECT_FALSE(savings_percent(400.0, std::nullopt));
  EXPECT_FALSE(savings_percent(std::nullopt, 500.0));
  EXPECT_FALSE(savings_percent(10.0, 0.0));
}

TEST(IterationsToTargetTest, FirstRowAtOrAbove) {
  const std::vector<train::MetricsRow> rows = {{0, 1, 0.1, 0, {}}, {10, 1, 0.64, 0, {}}, {20, 1, 0.65, 0, {}},
                                               {30, 1, 0.5, 0, {}}};
  EXPECT_EQ(iterations_to_target(rows, 0.65), 20u);
  EXPECT_FALSE(iterations_to_target(rows, 0.9));
}

TEST(MedianTest, NotReachedCountsAsInfinite) {
  const std::vector<std::optional<std::size_t>> a = {300, std::nullopt, 100};
  EXPECT_DOUBLE_EQ(*median_iterations(a), 300.0);
  const std::vector<std::optional<std::size_t>> b = {300, std::nullopt, std::nullopt};
  EXPECT_FALSE(median_iterations(b));
  const std::vector<std::optional<std::size_t>> c = {100, 200};
  EXPECT_DOUBLE_EQ(*median_iterations(c), 150.0);
}

TEST(RunNameTest, SkipsSeedDirectories) {
  EXPECT_EQ(run_name("out/sr10-dagc_r/seed-3/metrics.csv"), "sr10-dagc_r");
  EXPECT_EQ(run_name("out/uniform/metrics.csv"), "uniform");
  EXPECT_EQ(run_name("out/seed-x/metrics.csv"), "seed-x");
  EXPECT_EQ(run_name("metrics.csv"), "metrics");
}

TEST(CompareTest, TableAndUndefinedSavings) {
  const auto dir = temp_dir("compare");
  write_csv(dir / "base" / "metrics.csv", {{0, 0.1}, {500, 0.7}});
  write_csv(dir / "fast" / "metrics.csv", {{0, 0.1}, {400, 0.7}});
  write_csv(dir / "never" / "metrics.csv", {{0, 0.1}, {500, 0.2}});
  const std::vector<fs::path> csvs = {dir / "base" / "metrics.csv", dir / "fast" / "metrics.csv",
                                      dir / "never" / "metrics.csv"};
  const auto rows = compare_runs(csvs, 0.65, "base");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_DOUBLE_EQ(*rows[1].savings, 20.0);
  EXPECT_FALSE(rows[2].median_iterations);
  const auto text = format_compare(rows, 0.65, "base");
  EXPECT_NE(text.find("20.0%"), std::string::npos) << text;
  EXPECT_NE(text.find("not reached"), std::string::npos) << text;

  const auto none = compare_runs(csvs, 0.65, "never");
  EXPECT_FALSE(none[0].savings);
  EXPECT_NE(format_compare(none, 0.65, "never").find("undefined"), std::string::npos);
  EXPECT_THROW(compare_runs(csvs, 0.65, "missing"), std::invalid_argument);
}

TEST(AllocationJsonTest, RoundTripAndRevalidation) {
  train::AllocationRecord r;
  r.strategy = "dagc_r";
  r.kind = "ratio";
  r.weights = {0.8, 0.2};
  r.values = {0.3, 0.1};
  r.mean = 0.2;
  const auto back = parse_allocation_json(allocation_json(r));
  EXPECT_EQ(back.values, r.values);
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(allocation_json(r))["skew_ratio"].get<double>(), 4.0);

  auto j = nlohmann::json::parse(allocation_json(r));
  j["ratios"] = {0.35, 0.1};
  EXPECT_THROW(parse_allocation_json(j.dump()), std::invalid_argument);
  j["ratios"] = {1.3, 0.1};
  j["mean_ratio"] = 0.7;
  EXPECT_THROW(parse_allocation_json(j.dump()), std::invalid_argument);
  EXPECT_THROW(parse_allocation_json("{"), std::invalid_argument);

  r.kind = "threshold";
  r.values = {0.1, 0.1};
  r.mean = 0.1;
  EXPECT_NO_THROW(parse_allocation_json(allocation_json(r)));
  r.mean = 0.2;
  EXPECT_THROW(parse_allocation_json(allocation_json(r)), std::invalid_argument);
}

TEST(WeightsArgTest, ListAndFile) {
  EXPECT_EQ(parse_weights_arg("0.5,0.3,0.2"), (std::vector<double>{0.5, 0.3, 0.2}));
  const auto dir = temp_dir("weights");
  {
    std::ofstream out(dir / "w.txt");
    out << "0.6\n0.4\n";
  }
  EXPECT_EQ(parse_weights_arg((dir / "w.txt").string()), (std::vector<double>{0.6, 0.4}));
  EXPECT_THROW(parse_weights_arg("0.5,abc"), ConfigError);
  EXPECT_THROW(parse_weights_arg(""), ConfigError);
}

TEST(SeedsTest, Expansion) { EXPECT_EQ(expand_seeds(7, 3), (std::vector<std::uint64_t>{7, 8, 9})); }

TEST(RunCommandTest, WritesArtifactsAndIsReproducible) {
  const auto dir = temp_dir("run");
  std::ostringstream err;
  ASSERT_EQ(run_command(tiny(), dir / "a", 1, err), kOk) << err.str();
  ASSERT_EQ(run_command(tiny(), dir / "b", 1, err), kOk) << err.str();
  for (const char* f : {"metrics.csv", "allocation.json", "partition.json", "config.resolved.toml"}) {
    ASSERT_TRUE(fs::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  EXPECT_EQ(config::parse_config(dir / "a" / "config.resolved.toml"), tiny());
  EXPECT_NO_THROW(load_allocation_json(dir / "a" / "allocation.json"));
}

TEST(RunCommandTest, MultipleSeeds) {
  const auto dir = temp_dir("seeds");
  std::ostringstream err;
  ASSERT_EQ(run_command(tiny(), dir, 3, err), kOk) << err.str();
  const auto j = nlohmann::json::parse(slurp(dir / "seeds.json"));
  EXPECT_EQ(j["master_seed"], 1);
  ASSERT_EQ(j["runs"].size(), 3u);
  EXPECT_EQ(j["runs"][2]["dir"], "seed-3");
  EXPECT_EQ(j["runs"][2]["seed"], 3);
  EXPECT_TRUE(fs::exists(dir / "seed-2" / "metrics.csv"));
  EXPECT_NE(slurp(dir / "seed-1" / "metrics.csv"), slurp(dir / "seed-2" / "metrics.csv"));
}

TEST(RunCommandTest, ExitCodes) {
  const auto dir = temp_dir("codes");
  std::ostringstream err;
  auto bad = tiny();
  bad.mean_ratio = 1.5;
  EXPECT_EQ(run_command(bad, dir / "bad", 1, err), kConfigError);
  EXPECT_NE(err.str().find("compression.mean_ratio"), std::string::npos);

  auto infeasible = tiny();
  infeasible.weight_source = train::WeightSource::explicit_list;
  infeasible.explicit_weights = {0.6, 0.3, 0.1};
  infeasible.mean_ratio = 0.9;
  EXPECT_EQ(run_command(infeasible, dir / "inf", 1, err), kBudgetInfeasible);

  auto missing = tiny();
  missing.dataset.kind = train::DatasetKind::idx;
  missing.dataset.train_images = (dir / "nope-images").string();
  missing.dataset.train_labels = (dir / "nope-labels").string();
  missing.dataset.test_images = missing.dataset.train_images;
  missing.dataset.test_labels = missing.dataset.train_labels;
  EXPECT_EQ(run_command(missing, dir / "io", 1, err), kIoError);
}

TEST(PresetTest, Contents) {
  const auto m = preset("motivating-logistic");
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0].name, "scheme_I");
  EXPECT_EQ(m[0].config.manual_ratios[0], 0.01);
  EXPECT_EQ(m[2].config.manual_ratios[1], 0.0011);
  EXPECT_EQ(m[1].config.mean_ratio, 0.001);
  for (const auto& r : m) EXPECT_EQ(r.config.workers, 11u);

  const auto s = preset("sweep-sr");
  ASSERT_EQ(s.size(), 9u);
  EXPECT_EQ(s[0].name, "sr10-dagc_r");
  EXPECT_EQ(s[8].name, "sr1000-accordion_r");
  EXPECT_THROW(preset("nope"), ConfigError);
}

}  // namespace
}  // namespace dagc::experiment
