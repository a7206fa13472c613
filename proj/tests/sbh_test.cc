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

#include "pws/sbh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "pws/key_sanitizer.hpp"
#include "support/oracles.hpp"

namespace pws {
namespace {

// Composite Simpson from lo to 80/ε past the last kink, split at the kinks
// so every piece is smooth.
double Simpson(const std::function<double(double)>& f, double lo, double eps,
               std::vector<double> kinks) {
  std::sort(kinks.begin(), kinks.end());
  const double hi = std::max(lo, kinks.empty() ? lo : kinks.back()) + 80.0 / eps;
  std::vector<double> cuts{lo};
  for (double k : kinks) {
    if (k > lo && k < hi) cuts.push_back(k);
  }
  cuts.push_back(hi);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    // At least 400 steps per Laplace scale length, and an even count.
    const int n = 2 * std::max(10000, static_cast<int>(200.0 * eps * (cuts[p + 1] - cuts[p])));
    const double h = (cuts[p + 1] - cuts[p]) / n;
    double s = f(cuts[p]) + f(cuts[p + 1]);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(cuts[p] + k * h);
    total += s * h / 3.0;
  }
  return total;
}

double Lap(double eps, double x) { return 0.5 * eps * std::exp(-eps * std::abs(x)); }

std::vector<KeyFrequency> ConstantData(int n, Frequency w, const std::string& prefix) {
  std::vector<KeyFrequency> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out.push_back({prefix + std::to_string(k), w});
  return out;
}

TEST(SbhReportProbTest, ThresholdAndLowFrequencyRatio) {
  const PrivacyParams params(0.1, 0.01);
  EXPECT_NEAR(SbhThreshold(params), std::log(100.0) / 0.1 + 1.0, 1e-12);
  EXPECT_NEAR(SbhReportProb(params, SbhThreshold(params)), 0.5, 1e-15);
  const auto rv = ComputePi(params, SamplingScheme::None(), 5);
  EXPECT_NEAR(rv.pi(1) / SbhReportProb(params, 1.0), 2.0, 1e-12);
  for (Frequency i = 1; i <= 5; ++i) {
    const double ratio = rv.pi(i) / SbhReportProb(params, static_cast<double>(i));
    EXPECT_NEAR(ratio, 2.0 * i, 0.2 * 2.0 * i) << i;
  }
}

TEST(SbhReportProbTest, MatchesMonteCarlo) {
  const PrivacyParams params(0.1, 0.01);
  const int n = 400000;
  for (Frequency i : {20, 47, 60}) {
    const auto out = SbhSanitize(ConstantData(n, i, "k"), params, 17);
    const double phi = SbhReportProb(params, static_cast<double>(i));
    EXPECT_NEAR(static_cast<double>(out.size()) / n, phi,
                4.0 * std::sqrt(phi * (1.0 - phi) / n))
        << i;
    for (const auto& kv : out) ASSERT_GE(kv.value, SbhThreshold(params));
  }
}

TEST(SampledSbhReportProbTest, MatchesSimpsonOracle) {
  for (const auto& params : {PrivacyParams(0.1, 0.01), PrivacyParams(0.1, 0.001)}) {
    const double eps = params.epsilon();
    const double t = SbhThreshold(params);
    for (const auto& scheme :
         {SamplingScheme::Ppswor(1.0), SamplingScheme::Ppswor(0.01),
          SamplingScheme::Pps(0.05), SamplingScheme::Pps(1e-3),
          SamplingScheme::Ppswor(0.05, FrequencyFunction::Power(0.5))}) {
      for (double i : {1.0, 30.0, t, 80.0, 400.0, 10000.0}) {
        const double oracle = Simpson(
            [&](double w) { return Lap(eps, w - i) * scheme.InclusionProbReal(w); },
            t, eps, {i, 1.0 / scheme.tau()});
        EXPECT_NEAR(SampledSbhReportProb(params, scheme, i), oracle, 1e-10)
            << scheme.Describe() << " i=" << i;
      }
    }
    EXPECT_EQ(SampledSbhReportProb(params, SamplingScheme::None(), 30.0),
              SbhReportProb(params, 30.0));
  }
}

TEST(SampledSbhReportProbTest, MatchesMonteCarlo) {
  const PrivacyParams params(0.1, 0.01);
  const auto scheme = SamplingScheme::Ppswor(0.02);
  const int n = 400000;
  for (Frequency i : {50, 100}) {
    const auto out = SampledSbhSanitize(ConstantData(n, i, "s"), params, scheme, 23);
    const double psi = SampledSbhReportProb(params, scheme, static_cast<double>(i));
    EXPECT_NEAR(static_cast<double>(out.size()) / n, psi,
                4.0 * std::sqrt(psi * (1.0 - psi) / n))
        << i;
  }
}

TEST(SbhMomentsTest, MatchesSimpsonOracle) {
  const PrivacyParams params(0.1, 0.01);
  const double eps = params.epsilon();
  const double t = SbhThreshold(params);
  for (const auto& scheme : {SamplingScheme::None(), SamplingScheme::Pps(0.02),
                             SamplingScheme::Ppswor(0.05)}) {
    for (const auto& g : {FrequencyFunction::Identity(), FrequencyFunction::Power(0.5)}) {
      for (Frequency i : {10, 47, 72, 150}) {
        const double x = static_cast<double>(i);
        const double first = Simpson([&](double w) { return g(w) * Lap(eps, w - x); },
                                     t, eps, {x, 50.0});
        const double second = Simpson(
            [&](double w) { return g(w) * g(w) / scheme.InclusionProbReal(w) * Lap(eps, w - x); },
            t, eps, {x, 50.0});
        const auto m = SbhMoments(params, scheme, g, i);
        EXPECT_NEAR(m.expectation, first, 1e-9 * std::max(1.0, first));
        EXPECT_NEAR(m.bias, first - g(x), 1e-9 * std::max(1.0, first));
        EXPECT_NEAR(m.variance, second - first * first, 1e-8 * std::max(1.0, second));
        EXPECT_NEAR(m.mse, m.variance + m.bias * m.bias, 1e-9 * std::max(1.0, m.mse));
      }
    }
  }
}

TEST(SbhMomentsTest, MatchesMonteCarlo) {
  const PrivacyParams params(0.1, 0.01);
  const auto g = FrequencyFunction::Identity();
  const int n = 400000;
  for (const auto& scheme : {SamplingScheme::None(), SamplingScheme::Pps(0.02)}) {
    for (Frequency i : {30, 72}) {
      const auto data = ConstantData(n, i, "m");
      const auto out = SampledSbhSanitize(data, params, scheme, 31);
      std::vector<double> est(static_cast<std::size_t>(n), 0.0);
      for (std::size_t k = 0; k < out.size(); ++k) {
        est[k] = SbhEstimate(scheme, g, out[k].value);
      }
      const auto exact = SbhMoments(params, scheme, g, i);
      const auto mean = testing::Summarize(est);
      EXPECT_NEAR(mean.mean, exact.expectation, 4.0 * mean.std_error)
          << scheme.Describe() << " i=" << i;
      std::vector<double> sq(est.size());
      for (std::size_t k = 0; k < est.size(); ++k) {
        sq[k] = (est[k] - static_cast<double>(i)) * (est[k] - static_cast<double>(i));
      }
      const auto mse = testing::Summarize(sq);
      EXPECT_NEAR(mse.mean, exact.mse, 4.0 * mse.std_error)
          << scheme.Describe() << " i=" << i;
    }
  }
}

TEST(SbhMomentsTest, BiasDiminishesWithFrequency) {
  const PrivacyParams params(0.1, 0.01);
  const auto g = FrequencyFunction::Identity();
  double previous = 1.0;
  for (Frequency i : {18, 40, 72, 100, 150, 250}) {
    const double rel = std::abs(SbhMoments(params, SamplingScheme::None(), g, i).bias) /
                       static_cast<double>(i);
    EXPECT_LT(rel, previous) << i;
    previous = rel;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(SbhConcordanceTest, MatchesSimpsonOracle) {
  for (const auto& params : {PrivacyParams(0.1, 0.01), PrivacyParams(0.5, 0.05)}) {
    const double eps = params.epsilon();
    const double t = SbhThreshold(params);
    for (const auto& [i1, i2] : std::vector<std::pair<double, double>>{
             {2, 1}, {30, 10}, {60, 40}, {100, 5}, {200, 199}, {10000, 3}, {10000, 9990}}) {
      const double phi1 = SbhReportProb(params, i1);
      const double phi2 = SbhReportProb(params, i2);
      auto survival1 = [&](double w) {
        const double x = w - i1;
        return x >= 0.0 ? 0.5 * std::exp(-eps * x) : 1.0 - 0.5 * std::exp(eps * x);
      };
      const double both = Simpson([&](double w) { return Lap(eps, w - i2) * survival1(w); },
                                  t, eps, {i1, i2});
      const double oracle =
          0.5 * (1.0 - phi1) * (1.0 - phi2) + phi1 * (1.0 - phi2) + both;
      EXPECT_NEAR(SbhConcordance(params, i1, i2), oracle, 1e-10) << i1 << " " << i2;
      EXPECT_EQ(SbhConcordance(params, i1, i2) + SbhConcordance(params, i2, i1), 1.0);
    }
    EXPECT_EQ(SbhConcordance(params, 7.0, 7.0), 0.5);
  }
}

TEST(SbhConcordanceTest, MatchesMonteCarlo) {
  const PrivacyParams params(0.1, 0.01);
  const int n = 300000;
  const Frequency i1 = 60;
  const Frequency i2 = 45;
  // Key k of the first population is paired with key k of the second.
  auto released = [&](Frequency w, const std::string& prefix) {
    std::vector<double> value(static_cast<std::size_t>(n), -1.0);
    for (const auto& kv : SbhSanitize(ConstantData(n, w, prefix), params, 41)) {
      value[std::stoul(kv.key.substr(prefix.size()))] = kv.value;
    }
    return value;
  };
  const auto a = released(i1, "a");
  const auto b = released(i2, "b");
  std::vector<double> score(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < score.size(); ++k) {
    score[k] = a[k] > b[k] ? 1.0 : (a[k] == b[k] ? 0.5 : 0.0);
  }
  const auto s = testing::Summarize(score);
  EXPECT_NEAR(s.mean, SbhConcordance(params, i1, i2), 4.0 * s.std_error);
}

TEST(SbhSanitizeTest, DeterministicPerSeed) {
  const PrivacyParams params(0.1, 0.01);
  const auto data = ConstantData(5000, 50, "d");
  const auto a = SbhSanitize(data, params, 9);
  EXPECT_EQ(a, SbhSanitize(data, params, 9));
  EXPECT_NE(a, SbhSanitize(data, params, 10));
  EXPECT_TRUE(SbhSanitize(std::span<const KeyFrequency>(), params, 9).empty());
}

TEST(SbhEstimateTest, InverseProbabilityOfTheNoisyValue) {
  const auto g = FrequencyFunction::Identity();
  EXPECT_DOUBLE_EQ(SbhEstimate(SamplingScheme::Pps(0.01), g, 50.0), 100.0);
  EXPECT_DOUBLE_EQ(SbhEstimate(SamplingScheme::None(), g, 50.0), 50.0);
  EXPECT_THROW(SbhEstimate(SamplingScheme::Pps(0.0), g, 50.0), DataError);
  EXPECT_THROW(SampledSbhReportProb(PrivacyParams(0.1, 0.01),
                                    SamplingScheme::Ppswor(0.1, FrequencyFunction::Tabulated({1.0})),
                                    3.0),
               std::invalid_argument);
}

}  // namespace
}  // namespace pws
