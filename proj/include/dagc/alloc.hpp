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

// Per-worker compression parameter allocation under a fixed traffic budget.
//
// Relative compressors (Top-k, Random-k) get ratios delta_i chosen to
// minimise
//
//     Phi(delta) = (sum_i p_i / sqrt(delta_i)) / sqrt(min_i delta_i)
//
// subject to sum_i delta_i = n * mean_ratio. Absolute compressors (hard
// threshold) get thresholds lambda_i minimising sum_i p_i^2 lambda_i^2 subject
// to the harmonic mean of the thresholds being mean_threshold.

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "dagc/weights.hpp"

namespace dagc::alloc {

class RatioAllocation {
 public:
  /// Checks every ratio is positive and that the ratios sum to
  /// n * mean_ratio within 1e-10 relative.
  RatioAllocation(std::vector<double> ratios, double mean_ratio);

  /// Builds an allocation whose mean is taken from the ratios themselves.
  static RatioAllocation from_ratios(std::vector<double> ratios);
  static RatioAllocation uniform(std::size_t n, double mean_ratio);

  std::size_t size() const { return ratios_.size(); }
  double operator[](std::size_t i) const { return ratios_[i]; }
  std::span<const double> view() const { return ratios_; }
  const std::vector<double>& ratios() const { return ratios_; }
  double mean_ratio() const { return mean_ratio_; }
  double min_ratio() const;
  double max_ratio() const;

 private:
  std::vector<double> ratios_;
  double mean_ratio_;
};

class ThresholdAllocation {
 public:
  /// Checks every threshold is positive and that n / sum(1/lambda_i) equals
  /// mean_threshold within 1e-10 relative.
  ThresholdAllocation(std::vector<double> thresholds, double mean_threshold);

  static ThresholdAllocation from_thresholds(std::vector<double> thresholds);
  static ThresholdAllocation uniform(std::size_t n, double mean_threshold);

  std::size_t size() const { return thresholds_.size(); }
  double operator[](std::size_t i) const { return thresholds_[i]; }
  std::span<const double> view() const { return thresholds_; }
  const std::vector<double>& thresholds() const { return thresholds_; }
  double mean_threshold() const { return mean_threshold_; }

 private:
  std::vector<double> thresholds_;
  double mean_threshold_;
};

/// Phi(delta) for the given weights. Homogeneous of degree -1 in delta.
double phi(const RatioAllocation& allocation, const WeightVector& weights);

/// Q_j for pivot worker j (1-based): (P - p_j^{2/3}) / p_n^{2/3} when j < n
/// and (P - p_n^{2/3}) / p_{n-1}^{2/3} when j == n, with P = sum p_i^{2/3}.
double q_factor(std::size_t j, const WeightVector& weights);

struct LocalOptimum {
  RatioAllocation allocation;
  double phi;          // closed-form value of the case-j bound
  std::size_t pivot;   // 1-based j
};

/// Closed-form minimiser of Phi for the case where worker j (1-based) holds
/// the smallest ratio. The pivot gets n*mean/(Q_j+1) and every other worker
/// scales it by (p_i / p_ref)^{2/3}, where p_ref is p_n (j < n) or p_{n-1}
/// (j == n).
///
/// Throws BudgetInfeasibleError if any resulting ratio exceeds 1.
LocalOptimum local_optimum(std::size_t j, const WeightVector& weights, double mean_ratio);

/// Scans the n local optima from j = n down to 1 and keeps the one with the
/// strictly smallest value; adjacent duplicate weights reuse the running
/// minimum instead of being recomputed, so ties resolve toward larger j.
RatioAllocation dagc_r(const WeightVector& weights, double mean_ratio);

/// Like dagc_r but also reports every evaluated candidate (skipped
/// duplicates are absent) and the winning pivot.
struct DagcRTrace {
  RatioAllocation best;
  std::size_t best_pivot;
  double best_phi;
  std::vector<LocalOptimum> candidates;
};
DagcRTrace dagc_r_trace(const WeightVector& weights, double mean_ratio);

/// lambda_i = mean_threshold * P / (n p_i^{2/3}).
ThresholdAllocation dagc_a(const WeightVector& weights, double mean_threshold);

/// sum_i p_i^2 lambda_i^2.
double key_factor_absolute(const WeightVector& weights, const ThresholdAllocation& thresholds);

struct BoundSides {
  double lhs;
  double rhs;
};

/// Both sides of sum b_i / sqrt(a_i) >= A^{-1/2} (sum b_i^{2/3})^{3/2}
/// for positive b, a with sum a_i == A (within 1e-10 relative).
BoundSides lagrange_bound_check(std::span<const double> b, std::span<const double> a, double total);

struct GridMinimum {
  RatioAllocation allocation;
  double phi;
  double resolution;  // grid spacing in ratio units
};

/// Exhaustive search over allocations whose ratios are positive multiples
/// of mean_ratio / grid_steps and sum to n * mean_ratio. Returns the
/// lexicographically first minimiser. Test oracle only: refuses n > 6 and
/// grid_steps < 20.
GridMinimum oracle_min_phi(const WeightVector& weights, double mean_ratio, std::size_t grid_steps);

}  // namespace dagc::alloc
