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

/// Dense real vector of model-parameter length. Entries are always finite;
/// construction from data containing NaN or Inf throws std::invalid_argument.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t dim) : values_(dim, 0.0) {}
  explicit DenseVector(std::vector<double> values);
  DenseVector(std::initializer_list<double> values)
      : DenseVector(std::vector<double>(values)) {}

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> view() const { return values_; }
  std::span<double> view() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double squared_norm() const;

  friend bool operator==(const DenseVector&, const DenseVector&) = default;

 private:
  std::vector<double> values_;
};

}  // namespace dagc
