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

#include "dagc/vector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dagc {

DenseVector::DenseVector(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::invalid_argument("DenseVector: non-finite entry at index " + std::to_string(i));
    }
  }
}

double DenseVector::squared_norm() const {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return sum;
}

}  // namespace dagc
