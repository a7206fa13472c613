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

// Optimal end-to-end key reporting probabilities for a private weighted
// sample, and the key sanitizer that applies them.

#ifndef PWS_KEY_SANITIZER_HPP_
#define PWS_KEY_SANITIZER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pws/common.hpp"
#include "pws/privacy.hpp"
#include "pws/random.hpp"
#include "pws/sampling.hpp"

namespace pws {

// One step of the reporting recurrence:
//   π_i = min{q_i, e^ε π_{i−1} + δ, 1 + e^{−ε}(π_{i−1} + δ − 1)}.
// Each term is the largest value allowed by, respectively, realizability,
// the upward DP constraint, and the downward DP constraint.
inline double NextReportingProb(const PrivacyParams& params, double previous,
                                double q) {
  const double eps = params.epsilon();
  const double delta = params.delta();
  return std::min({q, std::exp(eps) * previous + delta,
                   1.0 + std::exp(-eps) * (previous + delta - 1.0)});
}

// End-to-end reporting probabilities π_0..π_m. Entries past the last index
// with π_i < q_i equal q_i and are not stored.
class ReportingVector {
 public:
  ReportingVector(PrivacyParams params, SamplingScheme scheme)
      : params_(params), scheme_(std::move(scheme)), explicit_{0.0} {}

  const PrivacyParams& params() const { return params_; }
  const SamplingScheme& scheme() const { return scheme_; }
  Frequency max_frequency() const { return max_frequency_; }

  double q(Frequency i) const { return scheme_.InclusionProb(i); }

  double pi(Frequency i) const {
    CheckRange(i);
    if (i < static_cast<Frequency>(explicit_.size())) return explicit_[i];
    return q(i);
  }

  // p_i = π_i / q_i, the probability of keeping a sampled key.
  double keep_prob(Frequency i) const {
    CheckRange(i);
    const double qi = q(i);
    if (qi <= 0.0) {
      throw DataError("frequency " + std::to_string(i) +
                      " has zero sampling probability");
    }
    return std::min(1.0, pi(i) / qi);
  }

  // Number of stored entries (index 0 included).
  std::size_t stored_entries() const { return explicit_.size(); }

  // Runs the recurrence forward to `max_frequency`. Not thread-safe; finish
  // extending before sharing.
  void ExtendTo(Frequency max_frequency) {
    if (max_frequency <= max_frequency_) return;
    double previous = pi(max_frequency_);
    for (Frequency i = max_frequency_ + 1; i <= max_frequency; ++i) {
      const double qi = q(i);
      const double current = NextReportingProb(params_, previous, qi);
      if (current < qi) {
        // Materialize any implicit q-valued entries before this one.
        for (auto k = static_cast<Frequency>(explicit_.size()); k < i; ++k) {
          explicit_.push_back(q(k));
        }
        explicit_.push_back(current);
      }
      previous = current;
    }
    max_frequency_ = max_frequency;
  }

 private:
  void CheckRange(Frequency i) const {
    if (i < 0 || i > max_frequency_) {
      throw DataError("frequency " + std::to_string(i) +
                      " is beyond the reporting table (max_frequency " +
                      std::to_string(max_frequency_) +
                      "); extend the table");
    }
  }

  PrivacyParams params_;
  SamplingScheme scheme_;
  Frequency max_frequency_ = 0;
  std::vector<double> explicit_;
};

inline ReportingVector ComputePi(const PrivacyParams& params,
                                 const SamplingScheme& scheme,
                                 Frequency max_frequency) {
  if (max_frequency < 1) {
    throw std::invalid_argument("max_frequency must be >= 1");
  }
  ReportingVector rv(params, scheme);
  rv.ExtendTo(max_frequency);
  return rv;
}

// Closed form for the no-sampling (q ≡ 1) solution, with L = LValue(params):
//   δ(e^{εi} − 1)/(e^ε − 1)                 for i ≤ L + 1,
//   1 − δ(e^{ε(2L+2−i)} − 1)/(e^ε − 1)      for L + 1 < i ≤ 2L + 1,
//   1                                       for i ≥ 2L + 2.
// Only a cross-check: the two middle branches do not meet at i = L + 1, and
// the recurrence saturates one step earlier than the last branch says.
inline double PiStarClosedForm(const PrivacyParams& params, Frequency i) {
  if (i <= 0) return 0.0;
  const double eps = params.epsilon();
  const double delta = params.delta();
  const double len = LValue(params);
  const double x = static_cast<double>(i);
  if (x <= len + 1.0) return delta * std::expm1(eps * x) / std::expm1(eps);
  if (x <= 2.0 * len + 1.0) {
    return 1.0 - delta * std::expm1(eps * (2.0 * len + 2.0 - x)) /
                     std::expm1(eps);
  }
  return 1.0;
}

struct PpsworStructure {
  // min{i : π*_i > q_i} within 1..max_frequency, if any.
  std::optional<Frequency> crossover;
  // Largest |π_i − expected_i| where expected_i is π*_i before the crossover
  // and q_i from it on.
  double max_deviation = 0.0;
  bool holds = false;
};

// Two-phase shape of the solution under threshold ppswor with f(i) = i:
// the q ≡ 1 solution up to the crossover, then q. π* is taken from the
// q ≡ 1 recurrence.
inline PpsworStructure AnalyzePpsworStructure(const PrivacyParams& params,
                                              const SamplingScheme& scheme,
                                              Frequency max_frequency) {
  if (scheme.kind() != SchemeKind::kPpswor || !scheme.weight().is_identity()) {
    throw std::invalid_argument(
        "ppswor structure applies only to ppswor sampling with f(i) = i");
  }
  const ReportingVector star =
      ComputePi(params, SamplingScheme::None(), max_frequency);
  const ReportingVector actual = ComputePi(params, scheme, max_frequency);
  PpsworStructure out;
  for (Frequency i = 1; i <= max_frequency; ++i) {
    if (star.pi(i) > actual.q(i)) {
      out.crossover = i;
      break;
    }
  }
  const Frequency ell = out.crossover.value_or(max_frequency + 1);
  for (Frequency i = 1; i <= max_frequency; ++i) {
    const double expected = i < ell ? star.pi(i) : actual.q(i);
    out.max_deviation =
        std::max(out.max_deviation, std::abs(actual.pi(i) - expected));
  }
  out.holds = out.max_deviation <= kProbabilitySlack;
  return out;
}

// Keeps each sampled key independently with probability p_{w_x} = π/q.
inline std::vector<std::string> SanitizeKeys(const WeightedSample& sample,
                                             const ReportingVector& rv,
                                             std::uint64_t seed) {
  if (!(sample.scheme == rv.scheme())) {
    throw std::invalid_argument(
        "reporting vector was computed for a different sampling scheme");
  }
  std::vector<std::string> out;
  for (const auto& [key, w] : sample.pairs) {
    if (w > rv.max_frequency()) {
      throw DataError("key '" + key + "' has frequency " + std::to_string(w) +
                      " beyond the reporting table (max_frequency " +
                      std::to_string(rv.max_frequency()) +
                      "); extend the table");
    }
    if (rv.q(w) <= 0.0) {
      throw DataError("key '" + key + "' was sampled at frequency " +
                      std::to_string(w) +
                      " which has zero sampling probability");
    }
    const double keep = rv.keep_prob(w);
    KeyStream stream(seed, key, StreamPurpose::kKeySanitizer);
    if (keep >= 1.0 || stream.Uniform() < keep) out.push_back(key);
  }
  return out;
}

}  // namespace pws

#endif  // PWS_KEY_SANITIZER_HPP_
