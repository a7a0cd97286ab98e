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

#include "dagc/weights.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dagc {

void validate_weights(std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("weights: empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("weights: worker " + std::to_string(i + 1) +
                                  " has non-positive weight");
    }
    if (i > 0 && weights[i] > weights[i - 1]) {
      throw std::invalid_argument("weights: not descending at worker " + std::to_string(i + 1));
    }
    sum += weights[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("weights: sum is " + std::to_string(sum) + ", expected 1");
  }
}

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.size() < 2) throw std::invalid_argument("weights: need at least 2 workers");
  validate_weights(weights_);
}

WeightVector WeightVector::from_masses(std::vector<double> masses) {
  for (double m : masses) {
    if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("weights: masses must be positive");
  }
  std::sort(masses.begin(), masses.end(), std::greater<>());
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  for (double& m : masses) m /= total;
  return WeightVector(std::move(masses));
}

WeightVector WeightVector::uniform(std::size_t n) {
  return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

}  // namespace dagc
