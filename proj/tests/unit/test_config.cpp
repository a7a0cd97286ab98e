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
#include <string>

#include "dagc/config.hpp"
#include "dagc/error.hpp"

namespace dagc::config {
namespace {

using train::TrainConfig;

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(ConfigTest, MinimalKeepsDefaults) {
  const auto c = parse_config_text("[compression]\nmean_ratio = 0.01\n");
  TrainConfig expected;
  expected.mean_ratio = 0.01;
  EXPECT_EQ(c, expected);
}

TEST(ConfigTest, FullDocument) {
  const auto c = parse_config_text(R"(# experiment
[dataset]
kind = "synthetic"
samples = 2000
centroid_scale = 0.5

[partition]
workers = 4
weights = "explicit"
explicit = [0.4, 0.3, 0.2, 0.1]   # sorted descending
alpha = 0.3

[compression]
strategy = "dagc_a"
mean_threshold = 0.05

[model]
arch = "mlp"
hidden = 16

[train]
lr = 0.05
iterations = 300
seed = 7
trace = "out/trace.bin"
)");
  EXPECT_EQ(c.dataset.samples, 2000u);
  EXPECT_EQ(c.dataset.centroid_scale, 0.5);
  EXPECT_EQ(c.weight_source, train::WeightSource::explicit_list);
  EXPECT_EQ(c.explicit_weights, (std::vector<double>{0.4, 0.3, 0.2, 0.1}));
  EXPECT_EQ(c.strategy, train::Strategy::dagc_a);
  EXPECT_EQ(c.mean_threshold, 0.05);
  EXPECT_EQ(c.arch, model::Architecture::mlp1);
  EXPECT_EQ(c.hidden, 16u);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.trace_path, "out/trace.bin");
}

TEST(ConfigTest, RangeErrorNamesFieldAndBound) {
  const auto msg = error_of("[compression]\nstrategy = \"dagc_r\"\nmean_ratio = 1.5\n");
  EXPECT_NE(msg.find("compression.mean_ratio"), std::string::npos) << msg;
  EXPECT_NE(msg.find("(0, 1)"), std::string::npos) << msg;
}

TEST(ConfigTest, MissingFieldNamed) {
  const auto msg = error_of("[compression]\nstrategy = \"dagc_r\"\n");
  EXPECT_NE(msg.find("missing field"), std::string::npos) << msg;
  EXPECT_NE(msg.find("compression.mean_ratio"), std::string::npos) << msg;
}

TEST(ConfigTest, UnknownKeyAndSection) {
  EXPECT_NE(error_of("[train]\nlearning_rate = 0.1\n").find("unknown key 'train.learning_rate'"), std::string::npos);
  EXPECT_NE(error_of("[optim]\n").find("unknown section"), std::string::npos);
  EXPECT_NE(error_of("lr = 0.1\n").find("before any [section]"), std::string::npos);
}

TEST(ConfigTest, SyntaxAndTypeErrors) {
  EXPECT_NE(error_of("[train]\nlr = 0.1\nlr = 0.2\n").find("line 3: duplicate key"), std::string::npos);
  EXPECT_NE(error_of("[train]\nlr = fast\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("[train]\nlr = \"0.1\"\n").find("train.lr"), std::string::npos);
  EXPECT_NE(error_of("[train]\nbatch = -3\n").find("train.batch"), std::string::npos);
  EXPECT_NE(error_of("[train]\nbatch = 2.5\n").find("non-negative integer"), std::string::npos);
  EXPECT_NE(error_of("[compression]\nstrategy = \"magic\"\n").find("dagc_r"), std::string::npos);
  EXPECT_NE(error_of("[model]\narch = \"cnn\"\n").find("cnn"), std::string::npos);
}

TEST(ConfigTest, ExplicitWeightCountChecked) {
  const auto msg = error_of(
      "[partition]\nworkers = 3\nweights = \"explicit\"\nexplicit = [0.5, 0.5]\n[compression]\nmean_ratio = 0.1\n");
  EXPECT_NE(msg.find("partition.explicit"), std::string::npos) << msg;
}

TEST(ConfigTest, TomlRoundTrip) {
  TrainConfig c;
  c.dataset.samples = 1234;
  c.dataset.centroid_scale = 0.1 + 0.2;
  c.dataset.seed = 99;
  c.workers = 11;
  c.weight_source = train::WeightSource::dichotomous;
  c.p_large = 0.5;
  c.strategy = train::Strategy::manual;
  c.manual_ratios = std::vector<double>(11, 1.0 / 3.0);
  c.rounding = train::Rounding::carry;
  c.relative_compressor = train::RelativeCompressor::random_k;
  c.lr = 1e-3;
  c.trace_path = "a \"quoted\" path";
  EXPECT_EQ(parse_config_text(to_toml(c)), c);

  TrainConfig d;
  d.mean_ratio = 0.001;
  d.strategy = train::Strategy::accordion_r;
  d.arch = model::Architecture::mlp1;
  EXPECT_EQ(parse_config_text(to_toml(d)), d);
}

TEST(ConfigTest, MissingFileIsIoError) {
  EXPECT_THROW(parse_config(std::filesystem::temp_directory_path() / "dagc_no_such_config.toml"), IoError);
}

}  // namespace
}  // namespace dagc::config
