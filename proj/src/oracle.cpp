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
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dagc/alloc.hpp"

namespace dagc::alloc {
namespace {

struct GridSearch {
  std::span<const double> weights;
  std::vector<double> inv_sqrt;  // inv_sqrt[k] = 1/sqrt(k)
  std::size_t total_units;
  std::vector<std::size_t> current;
  std::vector<std::size_t> best;
  double best_value = std::numeric_limits<double>::infinity();

  // Assigns units to coordinate i; partial is sum_{k<i} p_k/sqrt(units_k).
  void visit(std::size_t i, std::size_t remaining, double partial, std::size_t min_units) {
    const std::size_t n = weights.size();
    if (i + 1 == n) {
      current[i] = remaining;
      const double sum = partial + weights[i] * inv_sqrt[remaining];
      const double value = sum * inv_sqrt[std::min(min_units, remaining)];
      if (value < best_value) {
        best_value = value;
        best = current;
      }
      return;
    }
    const std::size_t slots_left = n - i - 1;
    for (std::size_t k = 1; k + slots_left <= remaining; ++k) {
      current[i] = k;
      visit(i + 1, remaining - k, partial + weights[i] * inv_sqrt[k], std::min(min_units, k));
    }
  }
};

}  // namespace

GridMinimum oracle_min_phi(const WeightVector& weights, double mean_ratio, std::size_t grid_steps) {
  const std::size_t n = weights.size();
  if (n > 6) {
    throw std::invalid_argument("oracle_min_phi: refusing n = " + std::to_string(n) +
                                " (grid grows combinatorially; limit is 6)");
  }
  if (grid_steps < 20) throw std::invalid_argument("oracle_min_phi: grid_steps must be >= 20");
  if (!(mean_ratio > 0.0)) throw std::invalid_argument("oracle_min_phi: mean ratio must be positive");

  GridSearch search;
  search.weights = weights.view();
  search.total_units = n * grid_steps;
  search.inv_sqrt.resize(search.total_units + 1);
  search.inv_sqrt[0] = 0.0;
  for (std::size_t k = 1; k <= search.total_units; ++k) {
    search.inv_sqrt[k] = 1.0 / std::sqrt(static_cast<double>(k));
  }
  search.current.assign(n, 0);
  search.visit(0, search.total_units, 0.0, std::numeric_limits<std::size_t>::max());

  const double h = mean_ratio / static_cast<double>(grid_steps);
  std::vector<double> ratios(n);
  for (std::size_t i = 0; i < n; ++i) ratios[i] = h * static_cast<double>(search.best[i]);
  RatioAllocation allocation(std::move(ratios), mean_ratio);
  const double value = phi(allocation, weights);
  return GridMinimum{std::move(allocation), value, h};
}

}  // namespace dagc::alloc
