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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "dagc/alloc.hpp"
#include "dagc/error.hpp"
#include "dagc/random.hpp"

namespace dagc::alloc {
namespace {

// Reference values below were produced with 40-digit mpmath arithmetic.

WeightVector w532() { return WeightVector({0.5, 0.3, 0.2}); }

WeightVector random_weights(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> m(n);
  for (auto& v : m) v = u(rng);
  return WeightVector::from_masses(m);
}

TEST(WeightVectorTest, RejectsInvalid) {
  EXPECT_THROW(WeightVector({1.0}), std::invalid_argument);
  EXPECT_THROW(WeightVector({0.3, 0.7}), std::invalid_argument);
  EXPECT_THROW(WeightVector({0.6, 0.6}), std::invalid_argument);
  EXPECT_THROW(WeightVector({1.0, 0.0}), std::invalid_argument);
  EXPECT_NO_THROW(WeightVector({0.5, 0.5}));
}

TEST(RatioAllocationTest, BudgetChecked) {
  EXPECT_NO_THROW(RatioAllocation({0.1, 0.3}, 0.2));
  EXPECT_THROW(RatioAllocation({0.1, 0.31}, 0.2), std::invalid_argument);
  EXPECT_THROW(RatioAllocation({0.0, 0.4}, 0.2), std::invalid_argument);
}

TEST(ThresholdAllocationTest, HarmonicMeanChecked) {
  EXPECT_NO_THROW(ThresholdAllocation({1.0, 1.0 / 3.0}, 0.5));
  EXPECT_THROW(ThresholdAllocation({1.0, 0.5}, 0.5), std::invalid_argument);
}

TEST(PhiTest, TwoEqualWorkers) {
  EXPECT_NEAR(phi(RatioAllocation({0.1, 0.1}, 0.1), WeightVector({0.5, 0.5})), 10.0, 1e-12);
}

TEST(PhiTest, UniformIsReciprocal) {
  const auto w = WeightVector::uniform(3);
  for (double d : {0.001, 0.02, 0.5}) {
    EXPECT_NEAR(phi(RatioAllocation::uniform(3, d), w), 1.0 / d, 1e-12 / d);
  }
}

TEST(PhiTest, ThreeWorkerValue) {
  const RatioAllocation a = RatioAllocation::from_ratios({0.002, 0.0006, 0.0004});
  EXPECT_NEAR(phi(a, w532()), 1671.3894300707419487, 1e-12 * 1671.39);
}

TEST(PhiTest, HomogeneousDegreeMinusOne) {
  const RatioAllocation a = RatioAllocation::from_ratios({0.002, 0.0006, 0.0004});
  const RatioAllocation b = RatioAllocation::from_ratios({0.02, 0.006, 0.004});
  EXPECT_NEAR(phi(b, w532()), phi(a, w532()) / 10.0, 1e-12 * phi(a, w532()));
}

TEST(PhiTest, LengthMismatch) {
  EXPECT_THROW(phi(RatioAllocation::uniform(2, 0.1), w532()), std::invalid_argument);
}

TEST(QFactorTest, UniformGivesNMinusOne) {
  for (std::size_t n : {2u, 5u, 10u}) {
    const auto w = WeightVector::uniform(n);
    for (std::size_t j = 1; j <= n; ++j) EXPECT_NEAR(q_factor(j, w), static_cast<double>(n - 1), 1e-12);
  }
}

TEST(QFactorTest, TwoWorkersCancel) { EXPECT_NEAR(q_factor(1, WeightVector({0.8, 0.2})), 1.0, 1e-14); }

TEST(QFactorTest, ThreeWorkerMiddle) { EXPECT_NEAR(q_factor(2, w532()), 2.8420157493201933029, 1e-13); }

TEST(QFactorTest, IndexOutOfRange) {
  EXPECT_THROW(q_factor(0, w532()), std::invalid_argument);
  EXPECT_THROW(q_factor(4, w532()), std::invalid_argument);
}

TEST(LocalOptimumTest, UniformWeightsGiveUniformRatios) {
  const auto w = WeightVector::uniform(10);
  const auto uniform_phi = phi(RatioAllocation::uniform(10, 0.001), w);
  for (std::size_t j = 1; j <= 10; ++j) {
    const auto lo = local_optimum(j, w, 0.001);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(lo.allocation[i], 0.001, 1e-15);
    EXPECT_NEAR(lo.phi, uniform_phi, 1e-9 * uniform_phi);
  }
}

TEST(LocalOptimumTest, TwoWorkersLastPivot) {
  const auto lo = local_optimum(2, WeightVector({0.8, 0.2}), 0.001);
  EXPECT_NEAR(lo.allocation[0] + lo.allocation[1], 0.002, 1e-16);
  EXPECT_NEAR(lo.allocation[0], 0.001, 1e-15);
  EXPECT_NEAR(lo.allocation[1], 0.001, 1e-15);
  EXPECT_NEAR(lo.phi, 1000.0, 1e-9);
}

TEST(LocalOptimumTest, ThreeWorkerCases) {
  struct Case {
    std::size_t j;
    double d1, d2, d3, phi;
  };
  const Case cases[] = {
      {1, 0.00090624291793788327646, 0.0011875141641242334471, 0.00090624291793788327646, 1061.6073465269642314},
      {2, 0.0014383197801670540595, 0.00078084010991647297024, 0.00078084010991647297024, 1112.1395261789668718},
      {3, 0.0012382585630887936034, 0.00088087071845560319829, 0.00088087071845560319829, 1046.369590156072471},
  };
  for (const auto& c : cases) {
    const auto lo = local_optimum(c.j, w532(), 0.001);
    EXPECT_NEAR(lo.allocation[0], c.d1, 1e-15);
    EXPECT_NEAR(lo.allocation[1], c.d2, 1e-15);
    EXPECT_NEAR(lo.allocation[2], c.d3, 1e-15);
    EXPECT_NEAR(lo.phi, c.phi, 1e-9 * c.phi);
    EXPECT_NEAR(phi(lo.allocation, w532()), lo.phi, 1e-9 * lo.phi);
    EXPECT_DOUBLE_EQ(lo.allocation[c.j - 1], lo.allocation.min_ratio());
  }
}

TEST(LocalOptimumTest, PowerLawOnNonPivotSet) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto w = random_weights(2 + trial % 6, rng);
    for (std::size_t j = 1; j <= w.size(); ++j) {
      const auto lo = local_optimum(j, w, 0.001);
      for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t k = 0; k < w.size(); ++k) {
          if (i + 1 == j || k + 1 == j) continue;
          const double expected = std::pow(w[i] / w[k], 2.0 / 3.0);
          EXPECT_NEAR(lo.allocation[i] / lo.allocation[k], expected, 1e-9 * expected);
        }
      }
    }
  }
}

TEST(LocalOptimumTest, InfeasibleNamesWorker) {
  const WeightVector w({0.98, 0.01, 0.01});
  try {
    local_optimum(3, w, 0.5);
    FAIL() << "expected BudgetInfeasibleError";
  } catch (const BudgetInfeasibleError& e) {
    EXPECT_EQ(e.worker(), 1u);
    EXPECT_GT(e.ratio(), 1.0);
  }
}

TEST(DagcRTest, UniformWeightsExact) {
  for (std::size_t n : {2u, 3u, 7u, 10u, 11u}) {
    const auto a = dagc_r(WeightVector::uniform(n), 0.001);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(a[i], 0.001);
  }
}

TEST(DagcRTest, TwoWorkersAlwaysUniform) {
  const auto a = dagc_r(WeightVector({0.8, 0.2}), 0.001);
  EXPECT_NEAR(a[0], 0.001, 1e-15);
  EXPECT_NEAR(a[1], 0.001, 1e-15);
}

TEST(DagcRTest, DichotomousFavoursLargeWorker) {
  std::vector<double> w(11, 0.05);
  w[0] = 0.5;
  const WeightVector weights(w);
  const auto trace = dagc_r_trace(weights, 0.001);
  const auto& a = trace.best;
  for (std::size_t i = 1; i < 11; ++i) EXPECT_GT(a[0], a[i]);
  EXPECT_LT(trace.best_phi, phi(RatioAllocation::uniform(11, 0.001), weights));
  EXPECT_EQ(trace.best_pivot, 11u);
}

TEST(DagcRTest, SkipsRepeatedWeights) {
  std::vector<double> w(11, 0.05);
  w[0] = 0.5;
  const auto trace = dagc_r_trace(WeightVector(w), 0.001);
  // j = 3..10 repeat their predecessor's weight.
  ASSERT_EQ(trace.candidates.size(), 3u);
  EXPECT_EQ(trace.candidates[0].pivot, 11u);
  EXPECT_EQ(trace.candidates[1].pivot, 2u);
  EXPECT_EQ(trace.candidates[2].pivot, 1u);
}

TEST(DagcRTest, PicksSmallestCandidate) {
  const auto trace = dagc_r_trace(w532(), 0.001);
  ASSERT_EQ(trace.candidates.size(), 3u);
  double best = trace.candidates[0].phi;
  for (const auto& c : trace.candidates) best = std::min(best, c.phi);
  EXPECT_EQ(trace.best_phi, best);
  EXPECT_EQ(trace.best_pivot, 3u);
  EXPECT_NEAR(trace.best_phi, 1046.369590156072471, 1e-9 * 1046.37);
}

TEST(DagcRTest, BudgetExact) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto w = random_weights(2 + trial % 9, rng);
    const auto a = dagc_r(w, 0.001);
    const double sum = std::accumulate(a.view().begin(), a.view().end(), 0.0);
    EXPECT_NEAR(sum, 0.001 * static_cast<double>(w.size()), 1e-10 * sum);
  }
}

TEST(DagcRTest, RejectsBadMean) {
  EXPECT_THROW(dagc_r(w532(), 0.0), std::invalid_argument);
  EXPECT_THROW(dagc_r(w532(), 1.0), std::invalid_argument);
}

TEST(DagcATest, UniformWeightsExact) {
  for (std::size_t n : {2u, 5u, 10u}) {
    const auto t = dagc_a(WeightVector::uniform(n), 0.05);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(t[i], 0.05);
  }
}

TEST(DagcATest, TwoWorkerClosedForm) {
  const WeightVector w({0.8, 0.2});
  const auto t = dagc_a(w, 0.05);
  EXPECT_NEAR(t[0], 0.034921256574801246717, 1e-15);
  EXPECT_NEAR(t[1], 0.087996052494743658238, 1e-15);
  EXPECT_NEAR(key_factor_absolute(w, t), 0.0010902084730746908171, 1e-15);
  // bounded scalar minimiser over lambda_1 on the harmonic constraint
  EXPECT_LE(key_factor_absolute(w, t), 0.001090208473074691 * (1 + 1e-9));
}

TEST(DagcATest, BeatsFeasiblePerturbations) {
  Rng rng(3);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto w = random_weights(2 + trial % 4, rng);
    const auto t = dagc_a(w, 0.05);
    const double best = key_factor_absolute(w, t);
    EXPECT_LE(best, key_factor_absolute(w, ThresholdAllocation::uniform(w.size(), 0.05)) * (1 + 1e-12));
    for (int k = 0; k < 20; ++k) {
      std::vector<double> inv(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) inv[i] = (1.0 / t[i]) * std::exp(jitter(rng));
      const double scale = std::accumulate(inv.begin(), inv.end(), 0.0) / (static_cast<double>(w.size()) / 0.05);
      std::vector<double> thresholds(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) thresholds[i] = scale / inv[i];
      EXPECT_LE(best, key_factor_absolute(w, ThresholdAllocation::from_thresholds(thresholds)) * (1 + 1e-12));
    }
  }
}

TEST(DagcATest, PairwiseLawAndOrdering) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto w = random_weights(2 + trial % 8, rng);
    const auto t = dagc_a(w, 0.1);
    for (std::size_t i = 0; i + 1 < w.size(); ++i) EXPECT_LE(t[i], t[i + 1]);
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t j = 0; j < w.size(); ++j) {
        EXPECT_NEAR(std::pow(t[i] / t[j], -1.5), w[i] / w[j], 1e-9 * w[i] / w[j]);
      }
    }
  }
}

TEST(KeyFactorTest, Values) {
  EXPECT_NEAR(key_factor_absolute(WeightVector({0.5, 0.5}), ThresholdAllocation::uniform(2, 0.1)), 0.005, 1e-17);
  const WeightVector skewed({1.0 - 1e-9, 1e-9});
  const auto t = ThresholdAllocation::uniform(2, 0.1);
  EXPECT_NEAR(key_factor_absolute(skewed, t), std::pow((1.0 - 1e-9) * 0.1, 2), 1e-18);
}

TEST(LagrangeBoundTest, SymmetricEquality) {
  const auto s = lagrange_bound_check(std::vector<double>{1, 1}, std::vector<double>{0.5, 0.5}, 1.0);
  EXPECT_NEAR(s.lhs, 2 * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(s.rhs, 2 * std::sqrt(2.0), 1e-14);
}

TEST(LagrangeBoundTest, EqualityPoint) {
  const auto s = lagrange_bound_check(std::vector<double>{8, 1}, std::vector<double>{0.8, 0.2}, 1.0);
  EXPECT_NEAR(s.lhs, 11.180339887498948482, 1e-13);
  EXPECT_NEAR(s.rhs, 11.180339887498948482, 1e-13);
}

TEST(LagrangeBoundTest, StrictInequality) {
  const auto s = lagrange_bound_check(std::vector<double>{8, 1}, std::vector<double>{0.5, 0.5}, 1.0);
  EXPECT_NEAR(s.lhs, 12.727922061357855439, 1e-13);
  EXPECT_GT(s.lhs, s.rhs);
}

TEST(LagrangeBoundTest, RandomInstances) {
  Rng rng(9);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + trial % 8;
    std::vector<double> b(n), a(n);
    for (auto& v : b) v = u(rng);
    for (auto& v : a) v = u(rng);
    const double total = std::accumulate(a.begin(), a.end(), 0.0);
    const auto s = lagrange_bound_check(b, a, total);
    EXPECT_GE(s.lhs, s.rhs * (1 - 1e-12));
  }
}

TEST(LagrangeBoundTest, RejectsBrokenConstraint) {
  EXPECT_THROW(lagrange_bound_check(std::vector<double>{1, 1}, std::vector<double>{0.5, 0.6}, 1.0),
               std::invalid_argument);
  EXPECT_THROW(lagrange_bound_check(std::vector<double>{1, -1}, std::vector<double>{0.5, 0.5}, 1.0),
               std::invalid_argument);
}

TEST(OracleTest, UniformTwoWorkers) {
  const auto g = oracle_min_phi(WeightVector::uniform(2), 0.001, 50);
  EXPECT_NEAR(g.allocation[0], 0.001, g.resolution);
  EXPECT_NEAR(g.allocation[1], 0.001, g.resolution);
  EXPECT_NEAR(g.resolution, 0.001 / 50, 1e-18);
}

TEST(OracleTest, NotBelowClosedFormForTwoWorkers) {
  const WeightVector w({0.8, 0.2});
  const auto g = oracle_min_phi(w, 0.001, 50);
  EXPECT_GE(g.phi, phi(dagc_r(w, 0.001), w) * (1 - 1e-12));
}

TEST(OracleTest, MatchesPhiOfItsAllocation) {
  const auto g = oracle_min_phi(w532(), 0.001, 50);
  EXPECT_NEAR(phi(g.allocation, w532()), g.phi, 1e-12 * g.phi);
  const double sum = std::accumulate(g.allocation.view().begin(), g.allocation.view().end(), 0.0);
  EXPECT_NEAR(sum, 0.003, 1e-15);
}

TEST(OracleTest, RefusesLargeProblems) {
  EXPECT_THROW(oracle_min_phi(WeightVector::uniform(7), 0.001, 20), std::invalid_argument);
  EXPECT_THROW(oracle_min_phi(WeightVector::uniform(3), 0.001, 19), std::invalid_argument);
}

}  // namespace
}  // namespace dagc::alloc
