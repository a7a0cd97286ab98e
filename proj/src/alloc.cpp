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

#include "dagc/alloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "dagc/error.hpp"

namespace dagc::alloc {
namespace {

constexpr double kTwoThirds = 2.0 / 3.0;

void check_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

void check_mean_ratio(double mean_ratio) {
  if (!(mean_ratio > 0.0 && mean_ratio < 1.0)) {
    throw std::invalid_argument("mean ratio must lie in (0, 1), got " + std::to_string(mean_ratio));
  }
}

double sum_two_thirds(const WeightVector& w) {
  double total = 0.0;
  for (double p : w.view()) total += std::pow(p, kTwoThirds);
  return total;
}

// Reference weight that the non-pivot workers are scaled against.
double reference_weight(std::size_t j, const WeightVector& w) {
  const std::size_t n = w.size();
  return j < n ? w[n - 1] : w[n - 2];
}

// Case-j allocation without the feasibility check. Ratios are built from
// shares normalised to the budget so uniform weights give exactly the mean.
LocalOptimum build_local_optimum(std::size_t j, const WeightVector& w, double mean_ratio) {
  const std::size_t n = w.size();
  const double ref = reference_weight(j, w);
  std::vector<double> shares(n);
  for (std::size_t i = 0; i < n; ++i) {
    shares[i] = (i + 1 == j) ? 1.0 : std::pow(w[i] / ref, kTwoThirds);
  }
  const double share_sum = std::accumulate(shares.begin(), shares.end(), 0.0);
  const double nd = static_cast<double>(n);
  std::vector<double> ratios(n);
  for (std::size_t i = 0; i < n; ++i) ratios[i] = mean_ratio * (nd * shares[i] / share_sum);

  const double q = q_factor(j, w);
  const double pj = w[j - 1];
  const double bound = (pj * (1.0 + q) + ref * q * (1.0 + q)) / (nd * mean_ratio);
  return LocalOptimum{RatioAllocation(std::move(ratios), mean_ratio), bound, j};
}

void check_feasible(const RatioAllocation& a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > 1.0) throw BudgetInfeasibleError(i + 1, a[i]);
  }
}

}  // namespace

RatioAllocation::RatioAllocation(std::vector<double> ratios, double mean_ratio)
    : ratios_(std::move(ratios)), mean_ratio_(mean_ratio) {
  if (ratios_.empty()) throw std::invalid_argument("ratio allocation: empty");
  if (!(mean_ratio_ > 0.0)) throw std::invalid_argument("ratio allocation: mean ratio must be positive");
  double sum = 0.0;
  for (std::size_t i = 0; i < ratios_.size(); ++i) {
    if (!(ratios_[i] > 0.0) || !std::isfinite(ratios_[i])) {
      throw std::invalid_argument("ratio allocation: worker " + std::to_string(i + 1) +
                                  " has non-positive ratio");
    }
    sum += ratios_[i];
  }
  const double budget = static_cast<double>(ratios_.size()) * mean_ratio_;
  if (std::abs(sum - budget) > 1e-10 * budget) {
    throw std::invalid_argument("ratio allocation: ratios sum to " + std::to_string(sum) +
                                " but budget is " + std::to_string(budget));
  }
}

RatioAllocation RatioAllocation::from_ratios(std::vector<double> ratios) {
  const double sum = std::accumulate(ratios.begin(), ratios.end(), 0.0);
  const double mean = ratios.empty() ? 0.0 : sum / static_cast<double>(ratios.size());
  return RatioAllocation(std::move(ratios), mean);
}

RatioAllocation RatioAllocation::uniform(std::size_t n, double mean_ratio) {
  return RatioAllocation(std::vector<double>(n, mean_ratio), mean_ratio);
}

double RatioAllocation::min_ratio() const { return *std::min_element(ratios_.begin(), ratios_.end()); }
double RatioAllocation::max_ratio() const { return *std::max_element(ratios_.begin(), ratios_.end()); }

ThresholdAllocation::ThresholdAllocation(std::vector<double> thresholds, double mean_threshold)
    : thresholds_(std::move(thresholds)), mean_threshold_(mean_threshold) {
  if (thresholds_.empty()) throw std::invalid_argument("threshold allocation: empty");
  if (!(mean_threshold_ > 0.0)) {
    throw std::invalid_argument("threshold allocation: mean threshold must be positive");
  }
  double inv_sum = 0.0;
  for (std::size_t i = 0; i < thresholds_.size(); ++i) {
    if (!(thresholds_[i] > 0.0) || !std::isfinite(thresholds_[i])) {
      throw std::invalid_argument("threshold allocation: worker " + std::to_string(i + 1) +
                                  " has non-positive threshold");
    }
    inv_sum += 1.0 / thresholds_[i];
  }
  const double harmonic = static_cast<double>(thresholds_.size()) / inv_sum;
  if (std::abs(harmonic - mean_threshold_) > 1e-10 * mean_threshold_) {
    throw std::invalid_argument("threshold allocation: harmonic mean " + std::to_string(harmonic) +
                                " differs from " + std::to_string(mean_threshold_));
  }
}

ThresholdAllocation ThresholdAllocation::from_thresholds(std::vector<double> thresholds) {
  double inv_sum = 0.0;
  for (double t : thresholds) inv_sum += 1.0 / t;
  const double mean = static_cast<double>(thresholds.size()) / inv_sum;
  return ThresholdAllocation(std::move(thresholds), mean);
}

ThresholdAllocation ThresholdAllocation::uniform(std::size_t n, double mean_threshold) {
  return ThresholdAllocation(std::vector<double>(n, mean_threshold), mean_threshold);
}

double phi(const RatioAllocation& allocation, const WeightVector& weights) {
  check_same_length(allocation.size(), weights.size(), "phi");
  double numerator = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    numerator += weights[i] / std::sqrt(allocation[i]);
  }
  return numerator / std::sqrt(allocation.min_ratio());
}

double q_factor(std::size_t j, const WeightVector& weights) {
  const std::size_t n = weights.size();
  if (j < 1 || j > n) {
    throw std::invalid_argument("q_factor: worker index " + std::to_string(j) + " outside [1, " +
                                std::to_string(n) + "]");
  }
  const double total = sum_two_thirds(weights);
  const double pj = std::pow(weights[j - 1], kTwoThirds);
  return (total - pj) / std::pow(reference_weight(j, weights), kTwoThirds);
}

LocalOptimum local_optimum(std::size_t j, const WeightVector& weights, double mean_ratio) {
  check_mean_ratio(mean_ratio);
  if (j < 1 || j > weights.size()) {
    throw std::invalid_argument("local_optimum: worker index " + std::to_string(j) + " out of range");
  }
  LocalOptimum result = build_local_optimum(j, weights, mean_ratio);
  check_feasible(result.allocation);
  return result;
}

DagcRTrace dagc_r_trace(const WeightVector& weights, double mean_ratio) {
  check_mean_ratio(mean_ratio);
  const std::size_t n = weights.size();
  std::vector<LocalOptimum> candidates;
  std::optional<std::size_t> best;  // index into candidates
  double phi_min = std::numeric_limits<double>::infinity();

  for (std::size_t j = n; j >= 1; --j) {
    // Equal adjacent weights give an identical bound; keep the running minimum.
    if (j < n && j > 1 && weights[j - 1] == weights[j - 2]) continue;
    candidates.push_back(build_local_optimum(j, weights, mean_ratio));
    if (candidates.back().phi < phi_min) {
      phi_min = candidates.back().phi;
      best = candidates.size() - 1;
    }
  }

  const LocalOptimum& winner = candidates[*best];
  check_feasible(winner.allocation);
  return DagcRTrace{winner.allocation, winner.pivot, winner.phi, std::move(candidates)};
}

RatioAllocation dagc_r(const WeightVector& weights, double mean_ratio) {
  return dagc_r_trace(weights, mean_ratio).best;
}

ThresholdAllocation dagc_a(const WeightVector& weights, double mean_threshold) {
  if (!(mean_threshold > 0.0) || !std::isfinite(mean_threshold)) {
    throw std::invalid_argument("dagc_a: mean threshold must be positive");
  }
  // P / p_i^{2/3} evaluated as sum_k (p_k/p_1)^{2/3} / (p_i/p_1)^{2/3}, which
  // is exact for uniform weights.
  const std::size_t n = weights.size();
  std::vector<double> rel(n);
  for (std::size_t i = 0; i < n; ++i) rel[i] = std::pow(weights[i] / weights[0], kTwoThirds);
  const double rel_sum = std::accumulate(rel.begin(), rel.end(), 0.0);
  const double nd = static_cast<double>(n);
  std::vector<double> thresholds(n);
  for (std::size_t i = 0; i < n; ++i) thresholds[i] = mean_threshold * (rel_sum / (nd * rel[i]));
  return ThresholdAllocation(std::move(thresholds), mean_threshold);
}

double key_factor_absolute(const WeightVector& weights, const ThresholdAllocation& thresholds) {
  check_same_length(thresholds.size(), weights.size(), "key_factor_absolute");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double term = weights[i] * thresholds[i];
    total += term * term;
  }
  return total;
}

BoundSides lagrange_bound_check(std::span<const double> b, std::span<const double> a, double total) {
  check_same_length(b.size(), a.size(), "lagrange_bound_check");
  if (b.empty()) throw std::invalid_argument("lagrange_bound_check: empty input");
  if (!(total > 0.0)) throw std::invalid_argument("lagrange_bound_check: total must be positive");
  double a_sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0) || !(b[i] > 0.0)) {
      throw std::invalid_argument("lagrange_bound_check: inputs must be positive");
    }
    a_sum += a[i];
  }
  if (std::abs(a_sum - total) > 1e-10 * total) {
    throw std::invalid_argument("lagrange_bound_check: sum(a) = " + std::to_string(a_sum) +
                                " violates constraint " + std::to_string(total));
  }
  double lhs = 0.0;
  double b_two_thirds = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    lhs += b[i] / std::sqrt(a[i]);
    b_two_thirds += std::pow(b[i], kTwoThirds);
  }
  return {lhs, std::pow(b_two_thirds, 1.5) / std::sqrt(total)};
}

}  // namespace dagc::alloc
