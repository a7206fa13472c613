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

// Stability-based histogram (SbH) baseline: W = w + Lap(1/ε), released iff
// W ≥ T = ln(1/δ)/ε + 1. The sampled variant then applies the sampling law
// to W.

#ifndef PWS_SBH_HPP_
#define PWS_SBH_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pws/common.hpp"
#include "pws/estimators.hpp"
#include "pws/privacy.hpp"
#include "pws/random.hpp"
#include "pws/sampling.hpp"

namespace pws {

inline double SbhThreshold(const PrivacyParams& params) {
  return std::log(1.0 / params.delta()) / params.epsilon() + 1.0;
}

namespace internal {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// coef · exp(rate · w + offset), used on one piece of an integration range.
struct ExpTerm {
  double coef;
  double rate;
  double offset;
};

inline ExpTerm operator*(const ExpTerm& a, const ExpTerm& b) {
  return {a.coef * b.coef, a.rate + b.rate, a.offset + b.offset};
}

// ∫_lo^hi of the term. An infinite hi needs a negative rate.
inline double IntegrateTerm(const ExpTerm& t, double lo, double hi) {
  if (!(hi > lo) || t.coef == 0.0) return 0.0;
  const double at_lo = std::exp(t.rate * lo + t.offset);
  if (std::isinf(hi)) {
    if (!(t.rate < 0.0)) {
      throw std::logic_error("divergent exponential tail");
    }
    return -t.coef * at_lo / t.rate;
  }
  if (t.rate == 0.0) return t.coef * at_lo * (hi - lo);
  // Anchored at the end where the integrand is largest, so long pieces
  // neither overflow nor lose the result to 0 · ∞.
  if (t.rate > 0.0) {
    const double at_hi = std::exp(t.rate * hi + t.offset);
    return -t.coef * at_hi * std::expm1(-t.rate * (hi - lo)) / t.rate;
  }
  return t.coef * at_lo * std::expm1(t.rate * (hi - lo)) / t.rate;
}

inline double IntegrateTerms(std::span<const ExpTerm> terms, double lo,
                             double hi) {
  double total = 0.0;
  for (const auto& t : terms) total += IntegrateTerm(t, lo, hi);
  return total;
}

inline std::vector<ExpTerm> Multiply(std::span<const ExpTerm> a,
                                     std::span<const ExpTerm> b) {
  std::vector<ExpTerm> out;
  for (const auto& x : a) {
    for (const auto& y : b) out.push_back(x * y);
  }
  return out;
}

// Laplace(center, 1/ε) density on a piece lying on one side of `center`.
inline std::vector<ExpTerm> LaplaceDensity(double eps, double center,
                                           bool above) {
  if (above) return {{0.5 * eps, -eps, eps * center}};
  return {{0.5 * eps, eps, -eps * center}};
}

// Pr[center + Lap(1/ε) > w] on a piece lying on one side of `center`.
inline std::vector<ExpTerm> LaplaceSurvival(double eps, double center,
                                            bool above) {
  if (above) return {{0.5, -eps, eps * center}};
  return {{1.0, 0.0, 0.0}, {-0.5, eps, -eps * center}};
}

// Sorted, de-duplicated cut points within [lo, ∞), starting at lo.
inline std::vector<double> Pieces(double lo, std::vector<double> cuts) {
  std::vector<double> out{lo};
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts) {
    if (c > out.back() && std::isfinite(c)) out.push_back(c);
  }
  out.push_back(kInf);
  return out;
}

template <typename F>
double Quadrature(F&& f, std::span<const double> pieces) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, pieces[k], pieces[k + 1], 15, 1e-13);
  }
  return total;
}

inline double LaplacePdf(double eps, double x) {
  return 0.5 * eps * std::exp(-eps * std::abs(x));
}

// Points where the sampling law changes form: f(w)·τ = 1 for PPS.
inline std::vector<double> SchemeKinks(const SamplingScheme& scheme) {
  if (scheme.kind() != SchemeKind::kPps || !(scheme.tau() > 0.0)) return {};
  const auto& f = scheme.weight();
  if (f.is_identity()) return {1.0 / scheme.tau()};
  if (f.kind() == FrequencyFunction::Kind::kPower && f.exponent() > 0.0) {
    return {std::pow(1.0 / scheme.tau(), 1.0 / f.exponent())};
  }
  return {};
}

inline void RequireRealWeights(const SamplingScheme& scheme) {
  if (!scheme.weight().accepts_real()) {
    throw std::invalid_argument(
        "sampled SbH needs a sampling weight defined on real values");
  }
}

}  // namespace internal

// φ_i = Pr[i + Lap(1/ε) ≥ T].
inline double SbhReportProb(const PrivacyParams& params, double i) {
  const double x = SbhThreshold(params) - i;
  const double eps = params.epsilon();
  return x >= 0.0 ? 0.5 * std::exp(-eps * x) : 1.0 - 0.5 * std::exp(eps * x);
}

// ψ_i = ∫_T^∞ Lap(w − i) q(w) dw, the end-to-end reporting probability of
// sampled SbH. Closed form for no sampling and ppswor with f(w) = w;
// quadrature otherwise.
inline double SampledSbhReportProb(const PrivacyParams& params,
                                   const SamplingScheme& scheme, double i) {
  using internal::ExpTerm;
  const double eps = params.epsilon();
  const double t = SbhThreshold(params);
  if (scheme.kind() == SchemeKind::kNone) return SbhReportProb(params, i);
  internal::RequireRealWeights(scheme);
  if (scheme.kind() == SchemeKind::kPpswor && scheme.weight().is_identity()) {
    const std::vector<ExpTerm> q{{1.0, 0.0, 0.0}, {-1.0, -scheme.tau(), 0.0}};
    const auto pieces = internal::Pieces(t, {i});
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
      const bool above = pieces[k] >= i;
      const auto terms =
          internal::Multiply(internal::LaplaceDensity(eps, i, above), q);
      total += internal::IntegrateTerms(terms, pieces[k], pieces[k + 1]);
    }
    return total;
  }
  std::vector<double> cuts = internal::SchemeKinks(scheme);
  cuts.push_back(i);
  const auto pieces = internal::Pieces(t, cuts);
  return internal::Quadrature(
      [&](double w) {
        return internal::LaplacePdf(eps, w - i) * scheme.InclusionProbReal(w);
      },
      pieces);
}

// Released (key, W) pairs of SbH over the full data; W ≥ T.
inline std::vector<KeyValue<double>> SbhSanitize(
    std::span<const KeyFrequency> data, const PrivacyParams& params,
    std::uint64_t seed) {
  const double t = SbhThreshold(params);
  std::vector<KeyValue<double>> out;
  for (const auto& [key, w] : data) {
    KeyStream stream(seed, key, StreamPurpose::kLaplaceNoise);
    const double noisy =
        static_cast<double>(w) + stream.Laplace(1.0 / params.epsilon());
    if (noisy >= t) out.push_back({key, noisy});
  }
  return out;
}

// SbH followed by threshold sampling of the noisy values.
inline std::vector<KeyValue<double>> SampledSbhSanitize(
    std::span<const KeyFrequency> data, const PrivacyParams& params,
    const SamplingScheme& scheme, std::uint64_t seed) {
  internal::RequireRealWeights(scheme);
  const auto released = SbhSanitize(data, params, seed);
  return ThresholdSample(std::span<const KeyValue<double>>(released), scheme,
                         seed);
}

// Per-key estimate a = g(W)/q(W) for a released W; with no sampling q ≡ 1.
inline double SbhEstimate(const SamplingScheme& scheme,
                          const FrequencyFunction& g, double noisy) {
  const double q = scheme.InclusionProbReal(noisy);
  if (!(q > 0.0)) {
    throw DataError("released value " + std::to_string(noisy) +
                    " has zero sampling probability");
  }
  return g(noisy) / q;
}

// Moments of the per-key sampled-SbH estimate at true frequency i:
//   E = ∫_T^∞ g(w) Lap(w − i) dw,  E[a²] = ∫_T^∞ g(w)²/q(w) Lap(w − i) dw.
inline PerKeyMoments SbhMoments(const PrivacyParams& params,
                                const SamplingScheme& scheme,
                                const FrequencyFunction& g, Frequency i) {
  if (!g.accepts_real()) {
    throw std::invalid_argument("SbH moments need g defined on real values");
  }
  internal::RequireRealWeights(scheme);
  if (scheme.kind() != SchemeKind::kNone && !(scheme.tau() > 0.0)) {
    throw std::invalid_argument("sampled SbH needs tau > 0");
  }
  const double eps = params.epsilon();
  const double x = static_cast<double>(i);
  std::vector<double> cuts = internal::SchemeKinks(scheme);
  cuts.push_back(x);
  const auto pieces = internal::Pieces(SbhThreshold(params), cuts);
  const double first = internal::Quadrature(
      [&](double w) { return g(w) * internal::LaplacePdf(eps, w - x); },
      pieces);
  const double second = internal::Quadrature(
      [&](double w) {
        const double gw = g(w);
        return gw * gw / scheme.InclusionProbReal(w) *
               internal::LaplacePdf(eps, w - x);
      },
      pieces);
  PerKeyMoments out;
  out.frequency = i;
  out.expectation = first;
  out.bias = first - g(x);
  out.variance = std::max(0.0, second - first * first);
  out.mse = out.variance + out.bias * out.bias;
  return out;
}

// Pr[J1 > J2] + ½ Pr[J1 = J2] for SbH outputs at true frequencies i1, i2,
// with "not released" below every released value:
//   ½(1 − φ1)(1 − φ2) + φ1(1 − φ2) + Pr[W1 > W2 ≥ T].
// Evaluated with the larger frequency first; the other order is 1 minus that,
// and equal frequencies give exactly ½.
inline double SbhConcordance(const PrivacyParams& params, double i1,
                             double i2) {
  if (i1 == i2) return 0.5;
  if (i1 < i2) return 1.0 - SbhConcordance(params, i2, i1);
  const double eps = params.epsilon();
  const double t = SbhThreshold(params);
  const double phi1 = SbhReportProb(params, i1);
  const double phi2 = SbhReportProb(params, i2);
  const auto pieces = internal::Pieces(t, {i1, i2});
  double both = 0.0;
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    const double lo = pieces[k];
    const auto terms =
        internal::Multiply(internal::LaplaceDensity(eps, i2, lo >= i2),
                           internal::LaplaceSurvival(eps, i1, lo >= i1));
    both += internal::IntegrateTerms(terms, lo, pieces[k + 1]);
  }
  return 0.5 * (1.0 - phi1) * (1.0 - phi2) + phi1 * (1.0 - phi2) + both;
}

}  // namespace pws

#endif  // PWS_SBH_HPP_
