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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dagc {

/// Per-worker training weights p_1 >= p_2 >= ... >= p_n > 0 summing to one.
///
/// Public APIs use 1-based worker numbers in messages; storage is 0-based.
class WeightVector {
 public:
  /// Validates the invariants (n >= 2, positive, descending, sum within
  /// 1e-12 of one) and throws std::invalid_argument otherwise.
  explicit WeightVector(std::vector<double> weights);

  /// Normalizes arbitrary positive masses and sorts them descending.
  static WeightVector from_masses(std::vector<double> masses);

  static WeightVector uniform(std::size_t n);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> view() const { return weights_; }
  const std::vector<double>& values() const { return weights_; }

  /// p_1 / p_n.
  double skew_ratio() const { return weights_.front() / weights_.back(); }

 private:
  std::vector<double> weights_;
};

/// Same checks as WeightVector but admitting n == 1; used where a single
/// worker is a meaningful degenerate case (partitioning, training).
void validate_weights(std::span<const double> weights);

}  // namespace dagc
