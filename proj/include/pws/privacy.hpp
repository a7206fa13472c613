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

// Privacy parameters and a hockey-stick based (ε, δ)-DP checker for
// mechanisms whose per-key output law is a discrete distribution.

#ifndef PWS_PRIVACY_HPP_
#define PWS_PRIVACY_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pws/common.hpp"

namespace pws {

class PrivacyParams {
 public:
  PrivacyParams(double epsilon, double delta)
      : epsilon_(epsilon), delta_(delta) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw std::invalid_argument("epsilon must be a positive finite number");
    }
    if (!(delta > 0.0) || delta > 1.0) {
      throw std::invalid_argument("delta must lie in (0, 1]");
    }
  }

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

  bool operator==(const PrivacyParams&) const = default;

 private:
  double epsilon_;
  double delta_;
};

// L(ε, δ) = (1/ε) ln((e^ε − 1 + 2δ) / (δ(e^ε + 1))): the length of the
// geometric growth phase of the optimal reporting curve. Not necessarily an
// integer.
inline double LValue(const PrivacyParams& params) {
  const double eps = params.epsilon();
  const double delta = params.delta();
  return std::log((std::expm1(eps) + 2.0 * delta) /
                  (delta * (std::exp(eps) + 1.0))) /
         eps;
}

// A probability vector indexed by output token. Token 0 is "not reported"
// wherever the vector describes a sanitizer row.
class DiscreteDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  DiscreteDistribution() : probs_{1.0} {}

  explicit DiscreteDistribution(std::vector<double> probs)
      : probs_(std::move(probs)) {
    if (probs_.empty()) {
      throw std::invalid_argument("distribution must have at least one token");
    }
    for (double p : probs_) {
      if (!(p >= 0.0 && p <= 1.0 + kProbabilitySlack)) {
        throw std::invalid_argument("probability outside [0, 1]: " +
                                    std::to_string(p));
      }
    }
    const double total = PairwiseSum(probs_);
    if (std::abs(total - 1.0) > kSumTolerance) {
      throw std::invalid_argument("probabilities sum to " +
                                  std::to_string(total) + ", not 1");
    }
  }

  static DiscreteDistribution PointMass(std::size_t token,
                                        std::size_t size = 0) {
    std::vector<double> p(std::max(size, token + 1), 0.0);
    p[token] = 1.0;
    return DiscreteDistribution(std::move(p));
  }

  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  // Probability of `token`; zero beyond the stored support.
  double operator[](std::size_t token) const {
    return token < probs_.size() ? probs_[token] : 0.0;
  }

 private:
  std::vector<double> probs_;
};

namespace internal {

// Σ_j max(0, p_j − e^ε q_j) where missing entries are zero.
inline double HockeyStickPadded(std::span<const double> p,
                                std::span<const double> q, double epsilon) {
  const double scale = std::exp(epsilon);
  double total = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double qj = j < q.size() ? q[j] : 0.0;
    const double gap = p[j] - scale * qj;
    if (gap > 0.0) total += gap;
  }
  return total;
}

}  // namespace internal

// Hockey-stick divergence Σ_j max(0, p_j − e^ε q_j). This is the largest
// p(T) − e^ε q(T) over token subsets T, so the pair satisfies the DP
// inequality in the p→q direction iff the result is at most δ.
inline double HockeyStick(std::span<const double> p, std::span<const double> q,
                          double epsilon) {
  if (p.size() != q.size()) {
    throw std::invalid_argument(
        "hockey-stick divergence needs distributions over the same tokens (" +
        std::to_string(p.size()) + " vs " + std::to_string(q.size()) + ")");
  }
  return internal::HockeyStickPadded(p, q, epsilon);
}

inline double HockeyStick(const DiscreteDistribution& p,
                          const DiscreteDistribution& q, double epsilon) {
  return HockeyStick(p.probs(), q.probs(), epsilon);
}

struct DpReport {
  bool passed = true;
  // Pair (worst_frequency − 1, worst_frequency) attains the largest
  // divergence; 0 when fewer than two rows were given.
  std::size_t worst_frequency = 0;
  double worst_divergence = 0.0;
  // True when the worst divergence is row i measured against row i − 1.
  bool worst_is_upward = true;
};

// Checks every adjacent pair of per-frequency output laws in both directions.
// Neighboring datasets differ by one in a single key's frequency, so this is
// the complete (ε, δ) requirement for a per-key sanitizer. Rows of different
// lengths are compared as if zero-extended.
inline DpReport VerifyDp(std::span<const DiscreteDistribution> rows,
                         const PrivacyParams& params) {
  DpReport report;
  const double eps = params.epsilon();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    // Tokens missing from the first argument contribute max(0, −e^ε q) = 0,
    // so iterating over the first argument's support is enough.
    const double up =
        internal::HockeyStickPadded(rows[i].probs(), rows[i - 1].probs(), eps);
    const double down =
        internal::HockeyStickPadded(rows[i - 1].probs(), rows[i].probs(), eps);
    const double worst = std::max(up, down);
    if (worst > report.worst_divergence || report.worst_frequency == 0) {
      report.worst_divergence = worst;
      report.worst_frequency = i;
      report.worst_is_upward = up >= down;
    }
  }
  report.passed =
      report.worst_divergence <= params.delta() + kProbabilitySlack;
  return report;
}

}  // namespace pws

#endif  // PWS_PRIVACY_HPP_
