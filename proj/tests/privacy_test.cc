//
// Copyright 2026 The PWS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "pws/privacy.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "support/oracles.hpp"

namespace pws {
namespace {

// L is where the geometric ramp δ(e^{εx} − 1)/(e^ε − 1) at x and x + 1 sums
// to one; found here by bisection rather than by the closed form.
double BisectL(double eps, double delta) {
  auto ramp = [&](double x) {
    return delta * std::expm1(eps * x) / std::expm1(eps);
  };
  double lo = 0.0;
  double hi = 1.0;
  while (ramp(hi) + ramp(hi + 1.0) < 1.0) hi *= 2.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (ramp(mid) + ramp(mid + 1.0) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> RandomDistribution(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> exp(1.0);
  std::vector<double> p(n);
  double total = 0.0;
  for (double& v : p) total += (v = exp(rng));
  for (double& v : p) v /= total;
  return p;
}

TEST(PrivacyParamsTest, RejectsOutOfRangeValues) {
  EXPECT_THROW(PrivacyParams(0.0, 0.1), std::invalid_argument);
  EXPECT_THROW(PrivacyParams(-1.0, 0.1), std::invalid_argument);
  EXPECT_THROW(PrivacyParams(0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(PrivacyParams(0.1, 1.5), std::invalid_argument);
  EXPECT_THROW(PrivacyParams(std::nan(""), 0.1), std::invalid_argument);
  EXPECT_THROW(PrivacyParams(std::numeric_limits<double>::infinity(), 0.1),
               std::invalid_argument);
  EXPECT_NO_THROW(PrivacyParams(0.1, 1.0));
}

TEST(LValueTest, MatchesBisectionOracle) {
  for (const auto& [eps, delta] :
       std::vector<std::pair<double, double>>{{0.1, 0.01},
                                              {0.01, 1e-6},
                                              {0.5, 0.05},
                                              {1.0, 1e-3},
                                              {0.1, 0.001}}) {
    const double oracle = BisectL(eps, delta);
    EXPECT_NEAR(LValue(PrivacyParams(eps, delta)), oracle, 1e-9 * oracle)
        << eps << " " << delta;
  }
}

TEST(LValueTest, KnownValues) {
  EXPECT_NEAR(LValue(PrivacyParams(0.1, 0.01)), 17.83, 0.005);
  EXPECT_EQ(std::ceil(LValue(PrivacyParams(0.1, 0.01))), 18.0);
  // e^ε = 2 and δ = 1/46 make the ratio exactly 16 = 2^4.
  EXPECT_NEAR(LValue(PrivacyParams(std::log(2.0), 1.0 / 46.0)), 4.0, 1e-12);
}

TEST(LValueTest, DecreasesInDelta) {
  double previous = std::numeric_limits<double>::infinity();
  for (double delta : {1e-8, 1e-6, 1e-4, 1e-2, 0.1, 0.5}) {
    const double l = LValue(PrivacyParams(0.1, delta));
    EXPECT_LT(l, previous);
    previous = l;
  }
}

TEST(DiscreteDistributionTest, Validates) {
  EXPECT_THROW(DiscreteDistribution(std::vector<double>{}),
               std::invalid_argument);
  EXPECT_THROW(DiscreteDistribution(std::vector<double>{0.5, 0.6}),
               std::invalid_argument);
  EXPECT_THROW(DiscreteDistribution(std::vector<double>{-0.1, 1.1}),
               std::invalid_argument);
  const DiscreteDistribution d(std::vector<double>{0.25, 0.75});
  EXPECT_EQ(d[1], 0.75);
  EXPECT_EQ(d[7], 0.0);
  EXPECT_EQ(DiscreteDistribution::PointMass(2, 4).probs().size(), 4u);
}

TEST(HockeyStickTest, MatchesSubsetEnumeration) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const auto p = RandomDistribution(rng, n);
    const auto q = RandomDistribution(rng, n);
    for (double eps : {0.0, 0.05, 0.5, 2.0}) {
      EXPECT_NEAR(HockeyStick(p, q, eps),
                  testing::BruteForceHockeyStick(p, q, eps), 1e-14);
    }
  }
}

TEST(HockeyStickTest, ZeroForIdenticalAndTotalVariationAtZeroEpsilon) {
  const std::vector<double> p{0.2, 0.3, 0.5};
  const std::vector<double> q{0.5, 0.3, 0.2};
  EXPECT_EQ(HockeyStick(p, p, 0.3), 0.0);
  EXPECT_NEAR(HockeyStick(p, q, 0.0), 0.3, 1e-15);
  EXPECT_THROW(HockeyStick(p, std::vector<double>{1.0}, 0.1),
               std::invalid_argument);
}

TEST(VerifyDpTest, RandomizedResponseIsPureDp) {
  const double eps = 0.7;
  const double keep = std::exp(eps) / (1.0 + std::exp(eps));
  const std::vector<DiscreteDistribution> rows{
      DiscreteDistribution(std::vector<double>{keep, 1.0 - keep}),
      DiscreteDistribution(std::vector<double>{1.0 - keep, keep})};
  EXPECT_TRUE(VerifyDp(rows, PrivacyParams(eps, 1e-9)).passed);
  const DpReport tighter = VerifyDp(rows, PrivacyParams(0.5, 1e-9));
  EXPECT_FALSE(tighter.passed);
  EXPECT_EQ(tighter.worst_frequency, 1u);
}

TEST(VerifyDpTest, FindsTheWorstAdjacentPairAndDirection) {
  // Row 2 puts δ-excess mass on a token row 1 never emits.
  const std::vector<DiscreteDistribution> rows{
      DiscreteDistribution::PointMass(0),
      DiscreteDistribution(std::vector<double>{0.99, 0.01}),
      DiscreteDistribution(std::vector<double>{0.9, 0.0, 0.1}),
  };
  const DpReport report = VerifyDp(rows, PrivacyParams(0.1, 0.05));
  EXPECT_FALSE(report.passed);
  EXPECT_EQ(report.worst_frequency, 2u);
  EXPECT_TRUE(report.worst_is_upward);
  EXPECT_NEAR(report.worst_divergence,
              testing::BruteForceHockeyStick(rows[2].probs(), rows[1].probs(),
                                             0.1),
              1e-15);
}

TEST(VerifyDpTest, ZeroExtendsShorterRows) {
  const std::vector<DiscreteDistribution> rows{
      DiscreteDistribution(std::vector<double>{0.6, 0.4}),
      DiscreteDistribution(std::vector<double>{0.6, 0.4, 0.0, 0.0}),
  };
  const DpReport report = VerifyDp(rows, PrivacyParams(0.1, 1e-9));
  EXPECT_TRUE(report.passed);
  EXPECT_EQ(report.worst_divergence, 0.0);
}

}  // namespace
}  // namespace pws
