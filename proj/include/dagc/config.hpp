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

// Flat TOML-like experiment configuration.
//
//   [dataset]      kind, samples, test_samples, features, classes,
//                  centroid_scale, seed, train_images, train_labels,
//                  test_images, test_labels
//   [partition]    workers, weights ("skew" | "dichotomous" | "explicit"),
//                  skew_ratio, p_large, explicit, alpha
//   [compression]  strategy, mean_ratio, mean_threshold, ratios, thresholds,
//                  relative_compressor, rounding, accordion_switch,
//                  accordion_epoch
//   [model]        arch, hidden
//   [train]        lr, batch, iterations, eval_interval, seed, threads, trace
//
// Values are numbers, quoted strings or [a, b, ...] number lists. '#' starts
// a comment. Omitted keys keep the TrainConfig defaults.

#pragma once

#include <filesystem>
#include <string>

#include "dagc/train.hpp"

namespace dagc::config {

/// Parses and validates; throws ConfigError naming the key, line or bound.
train::TrainConfig parse_config_text(const std::string& text);
train::TrainConfig parse_config(const std::filesystem::path& path);

/// Every field written out explicitly; parse_config_text(to_toml(c)) == c.
std::string to_toml(const train::TrainConfig& config);

}  // namespace dagc::config
