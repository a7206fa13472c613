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

// Order preservation of sanitized outputs: pairwise concordance and the
// expected Kendall rank correlation over a population.

#ifndef PWS_ORDINAL_HPP_
#define PWS_ORDINAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pws/common.hpp"
#include "pws/frequency_sanitizer.hpp"
#include "pws/privacy.hpp"
#include "pws/sampling.hpp"

namespace pws {

namespace internal {

// Pr[J1 > J2] for independent J1 ~ p1, J2 ~ p2.
inline double ProbGreater(std::span<const double> p1,
                          std::span<const double> p2) {
  double below = 0.0;  // Pr[J2 < j]
  double greater = 0.0;
  const std::size_t n = std::max(p1.size(), p2.size());
  for (std::size_t j = 0; j < n; ++j) {
    const double a = j < p1.size() ? p1[j] : 0.0;
    const double b = j < p2.size() ? p2[j] : 0.0;
    greater += a * below;
    below += b;
  }
  return greater;
}

// Maps a concordance c ≥ ½ for one orientation to the pair (c, 1 − c); the
// subtraction is exact there, so the two orientations sum to exactly 1.
inline double Orient(double c_upper, bool upper) {
  return upper ? c_upper : 1.0 - c_upper;
}

}  // namespace internal

// Pr[J1 > J2] + ½ Pr[J1 = J2] for independent J1 ~ p1, J2 ~ p2. Tokens are
// ordered by index, so token 0 (not reported) is the minimum. Both inputs
// are complete distributions, so this equals ½ + ½(Pr[J1 > J2] − Pr[J1 < J2]);
// swapping the arguments gives exactly 1 minus the result, and identical
// inputs give exactly ½.
inline double ConcordanceProb(std::span<const double> p1,
                              std::span<const double> p2) {
  const double x =
      internal::ProbGreater(p1, p2) - internal::ProbGreater(p2, p1);
  return internal::Orient(0.5 + 0.5 * std::abs(x), x >= 0.0);
}

inline double ConcordanceProb(const DiscreteDistribution& p1,
                              const DiscreteDistribution& p2) {
  return ConcordanceProb(p1.probs(), p2.probs());
}

// Concordance of the table's outputs for true frequencies i1 and i2.
inline double TableConcordance(const SanitizerTable& table, Frequency i1,
                               Frequency i2) {
  return ConcordanceProb(table.row(i1), table.row(i2));
}

// Expected Kendall τ-a between true frequencies and outputs, over all pairs
// of keys whose true frequencies differ:
//   Σ c_{i1} c_{i2} (2 C(i1, i2) − 1) / Σ c_{i1} c_{i2},  i1 > i2,
// where C is the concordance for the larger frequency. Undefined when every
// key has the same frequency.
inline std::optional<double> ExpectedKendallTau(
    const FrequencyHistogram& population,
    const std::function<double(Frequency, Frequency)>& concordance) {
  std::vector<std::pair<Frequency, double>> groups;
  for (const auto& [f, c] : population.counts()) {
    groups.emplace_back(f, static_cast<double>(c));
  }
  std::vector<double> weighted;
  std::vector<double> weights;
  for (std::size_t a = 0; a < groups.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      const double w = groups[a].second * groups[b].second;
      weights.push_back(w);
      weighted.push_back(
          w * (2.0 * concordance(groups[a].first, groups[b].first) - 1.0));
    }
  }
  if (weights.empty()) return std::nullopt;
  return PairwiseSum(weighted) / PairwiseSum(weights);
}

inline std::optional<double> ExpectedKendallTau(
    const FrequencyHistogram& population, const SanitizerTable& table) {
  return ExpectedKendallTau(population, [&](Frequency i1, Frequency i2) {
    return TableConcordance(table, i1, i2);
  });
}

}  // namespace pws

#endif  // PWS_ORDINAL_HPP_
