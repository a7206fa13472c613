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

// Per-token estimate coefficients for linear statistics s = Σ_x L(x) g(w_x)
// and exact moments of the resulting estimators.

#ifndef PWS_ESTIMATORS_HPP_
#define PWS_ESTIMATORS_HPP_

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "pws/common.hpp"
#include "pws/frequency_sanitizer.hpp"
#include "pws/key_sanitizer.hpp"
#include "pws/sampling.hpp"

namespace pws {

// a_j for each token j ≥ 1. Tokens no row can emit have no coefficient.
class EstimatorCoeffs {
 public:
  EstimatorCoeffs(FrequencyFunction g, std::vector<std::optional<double>> values)
      : g_(std::move(g)), values_(std::move(values)) {}

  const FrequencyFunction& g() const { return g_; }
  std::size_t size() const { return values_.size(); }
  bool defined(std::size_t token) const {
    return token < values_.size() && values_[token].has_value();
  }

  double at(std::size_t token) const {
    if (!defined(token)) {
      throw DataError("no estimate coefficient for token " +
                      std::to_string(token));
    }
    return *values_[token];
  }

  std::span<const std::optional<double>> values() const { return values_; }

 private:
  FrequencyFunction g_;
  std::vector<std::optional<double>> values_;
};

// Non-private inverse-probability (Horvitz-Thompson) estimate a_i = g(i)/q_i
// for a key sampled at frequency i; tokens are frequencies.
inline EstimatorCoeffs InverseProbCoeffs(const SamplingScheme& scheme,
                                         const FrequencyFunction& g,
                                         Frequency max_frequency) {
  std::vector<std::optional<double>> a(static_cast<std::size_t>(max_frequency) + 1);
  for (Frequency i = 1; i <= max_frequency; ++i) {
    const double q = scheme.InclusionProb(i);
    const double gi = g(static_cast<double>(i));
    if (q <= 0.0) {
      if (gi > 0.0) {
        throw DataError("frequency " + std::to_string(i) +
                        " is never sampled but g(i) > 0; inestimable");
      }
      a[static_cast<std::size_t>(i)] = 0.0;
      continue;
    }
    a[static_cast<std::size_t>(i)] = gi / q;
  }
  return EstimatorCoeffs(g, std::move(a));
}

// The unique unbiased coefficients for a stepwise table: forward substitution
// in Σ_{j≤i} π_{i,j} a_j = g(i). Some coefficients are negative.
inline EstimatorCoeffs UnbiasedCoeffs(const SanitizerTable& table,
                                      const FrequencyFunction& g) {
  const Frequency m = table.max_frequency();
  if (table.token_count() != static_cast<std::size_t>(m) + 1) {
    throw std::invalid_argument(
        "unbiased coefficients need a square (stepwise) table");
  }
  std::vector<std::optional<double>> a(static_cast<std::size_t>(m) + 1);
  std::vector<double> solved(static_cast<std::size_t>(m) + 1, 0.0);
  for (Frequency i = 1; i <= m; ++i) {
    const auto row = table.row(i).probs();
    const auto ii = static_cast<std::size_t>(i);
    const double diag = ii < row.size() ? row[ii] : 0.0;
    if (!(diag > 0.0)) {
      throw DataError("zero diagonal entry at frequency " + std::to_string(i) +
                      "; the unbiased system is singular");
    }
    double acc = 0.0;
    for (std::size_t j = 1; j < ii && j < row.size(); ++j) {
      acc += row[j] * solved[j];
    }
    solved[ii] = (g(static_cast<double>(i)) - acc) / diag;
    a[ii] = solved[ii];
  }
  return EstimatorCoeffs(g, std::move(a));
}

// Maximum-likelihood coefficients a_j = g(i*)/π_{i*}, i* = argmax_h π_{h,j}
// over the table's frequencies (ties go to the smaller h). Non-negative.
inline EstimatorCoeffs MleCoeffs(const SanitizerTable& table,
                                 const ReportingVector& rv,
                                 const FrequencyFunction& g) {
  const Frequency m = table.max_frequency();
  if (rv.max_frequency() < m) {
    throw std::invalid_argument("reporting vector is shorter than the table");
  }
  const std::size_t tokens = table.token_count();
  std::vector<double> best(tokens, 0.0);
  std::vector<Frequency> argmax(tokens, 0);
  for (Frequency h = 1; h <= m; ++h) {
    const auto row = table.row(h).probs();
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (row[j] > best[j]) {
        best[j] = row[j];
        argmax[j] = h;
      }
    }
  }
  std::vector<std::optional<double>> a(tokens);
  for (std::size_t j = 1; j < tokens; ++j) {
    if (argmax[j] == 0) continue;
    a[j] = g(static_cast<double>(argmax[j])) / rv.pi(argmax[j]);
  }
  return EstimatorCoeffs(g, std::move(a));
}

struct PerKeyMoments {
  Frequency frequency = 0;
  double expectation = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
};

// Moments of the per-key estimate for a key of true frequency i:
//   E_i = Σ_{j≥1} π_{i,j} a_j,  MSE_i = (1 − π_i) g(i)² + Σ_{j≥1} π_{i,j} (a_j − g(i))².
inline PerKeyMoments ComputePerKeyMoments(const SanitizerTable& table,
                                          const EstimatorCoeffs& coeffs,
                                          Frequency i) {
  const auto row = table.row(i).probs();
  const double gi = coeffs.g()(static_cast<double>(i));
  double expectation = 0.0;
  double reported = 0.0;
  double spread = 0.0;
  for (std::size_t j = 1; j < row.size(); ++j) {
    if (row[j] == 0.0) continue;
    const double a = coeffs.at(j);
    expectation += row[j] * a;
    reported += row[j];
    spread += row[j] * (a - gi) * (a - gi);
  }
  PerKeyMoments out;
  out.frequency = i;
  out.expectation = expectation;
  out.bias = expectation - gi;
  out.mse = (1.0 - reported) * gi * gi + spread;
  out.variance = std::max(0.0, out.mse - out.bias * out.bias);
  return out;
}

// Inverse-probability estimate on the non-private sample: unbiased with
// variance g(i)²(1/q_i − 1).
inline PerKeyMoments InverseProbMoments(const SamplingScheme& scheme,
                                        const FrequencyFunction& g,
                                        Frequency i) {
  const double q = scheme.InclusionProb(i);
  const double gi = g(static_cast<double>(i));
  PerKeyMoments out;
  out.frequency = i;
  if (q <= 0.0) {
    out.bias = -gi;
    out.mse = gi * gi;
    return out;
  }
  out.expectation = gi;
  out.variance = gi * gi * (1.0 / q - 1.0);
  out.mse = out.variance;
  return out;
}

// `count` keys of frequency `frequency`, each with weight L(x) = `weight`.
struct SelectionGroup {
  Frequency frequency = 0;
  std::int64_t count = 0;
  double weight = 1.0;
};

inline std::vector<SelectionGroup> SelectAll(const FrequencyHistogram& h,
                                             double weight = 1.0) {
  std::vector<SelectionGroup> out;
  for (const auto& [f, c] : h.counts()) out.push_back({f, c, weight});
  return out;
}

struct StatisticMoments {
  double statistic = 0.0;  // s = Σ L(x) g(w_x)
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
  std::optional<double> nrmse;  // undefined when s = 0
};

// Bias[ŝ] = Σ L Bias_w, Var[ŝ] = Σ L² Var_w, MSE = Var + Bias²,
// NRMSE = √MSE / s. Exact, from per-frequency moments.
inline StatisticMoments ComputeStatisticMoments(
    std::span<const SelectionGroup> selection, const FrequencyFunction& g,
    const std::function<PerKeyMoments(Frequency)>& moments) {
  std::vector<double> stat, bias, var;
  stat.reserve(selection.size());
  bias.reserve(selection.size());
  var.reserve(selection.size());
  std::unordered_map<Frequency, PerKeyMoments> cache;
  for (const auto& group : selection) {
    auto it = cache.find(group.frequency);
    if (it == cache.end()) {
      it = cache.emplace(group.frequency, moments(group.frequency)).first;
    }
    const double n = static_cast<double>(group.count);
    stat.push_back(n * group.weight * g(static_cast<double>(group.frequency)));
    bias.push_back(n * group.weight * it->second.bias);
    var.push_back(n * group.weight * group.weight * it->second.variance);
  }
  StatisticMoments out;
  out.statistic = PairwiseSum(stat);
  out.bias = PairwiseSum(bias);
  out.variance = PairwiseSum(var);
  out.mse = out.variance + out.bias * out.bias;
  if (out.statistic != 0.0) out.nrmse = std::sqrt(out.mse) / out.statistic;
  return out;
}

// ŝ = Σ_{(x,j) in the sanitized sample} L(x) a_j. Reads only the released
// tokens and public coefficients.
inline double EstimateStatistic(std::span<const KeyToken> sanitized,
                                const EstimatorCoeffs& coeffs,
                                const std::function<double(const std::string&)>&
                                    weight) {
  std::vector<double> terms;
  terms.reserve(sanitized.size());
  for (const auto& [key, token] : sanitized) {
    const double w = weight(key);
    if (w != 0.0) terms.push_back(w * coeffs.at(token));
  }
  return PairwiseSum(terms);
}

}  // namespace pws

#endif  // PWS_ESTIMATORS_HPP_
