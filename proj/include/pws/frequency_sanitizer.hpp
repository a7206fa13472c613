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

// Sanitized-frequency output laws. Two constructions are provided:
//
//  * a stepwise table π_{i,j}, 0 ≤ j ≤ i, built row by row by first placing
//    the least mass each low token must carry and then pushing the remaining
//    reporting mass as high as the upward constraint allows;
//  * piecewise-constant densities f_i on (0, i] plus an atom at 0, which are
//    discretized on the union of their breakpoints.
//
// Row i of either table is the end-to-end law of the token emitted for a key
// of frequency i (token 0: not sampled or not reported). Tokens are ordered;
// only their order carries meaning.

#ifndef PWS_FREQUENCY_SANITIZER_HPP_
#define PWS_FREQUENCY_SANITIZER_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pws/common.hpp"
#include "pws/key_sanitizer.hpp"
#include "pws/privacy.hpp"
#include "pws/random.hpp"
#include "pws/sampling.hpp"

namespace pws {

enum class TableConstruction { kStepwise, kDiscretizedPdf, kImported };

// Position of a token on the sanitized-frequency axis: (left, right].
struct TokenInterval {
  double left = 0.0;
  double right = 0.0;
};

class SanitizerTable {
 public:
  // tokens[0] describes the "not reported" token and is ignored.
  SanitizerTable(PrivacyParams params, SamplingScheme scheme,
                 TableConstruction construction,
                 std::vector<DiscreteDistribution> rows,
                 std::vector<TokenInterval> tokens)
      : params_(params),
        scheme_(std::move(scheme)),
        construction_(construction),
        rows_(std::move(rows)),
        tokens_(std::move(tokens)) {
    if (rows_.empty()) throw std::invalid_argument("table has no rows");
    std::size_t width = 0;
    for (const auto& r : rows_) width = std::max(width, r.size());
    if (tokens_.size() < width) {
      throw std::invalid_argument("token positions do not cover all rows");
    }
    reported_.reserve(rows_.size());
    for (const auto& r : rows_) {
      reported_.push_back(PairwiseSum(r.probs().subspan(1)));
    }
  }

  const PrivacyParams& params() const { return params_; }
  const SamplingScheme& scheme() const { return scheme_; }
  TableConstruction construction() const { return construction_; }
  Frequency max_frequency() const {
    return static_cast<Frequency>(rows_.size()) - 1;
  }
  // Number of tokens including token 0.
  std::size_t token_count() const { return tokens_.size(); }

  std::span<const DiscreteDistribution> rows() const { return rows_; }
  const DiscreteDistribution& row(Frequency i) const {
    CheckRange(i);
    return rows_[static_cast<std::size_t>(i)];
  }
  double entry(Frequency i, std::size_t token) const { return row(i)[token]; }
  // Σ_{j≥1} π_{i,j}.
  double reported_mass(Frequency i) const {
    CheckRange(i);
    return reported_[static_cast<std::size_t>(i)];
  }
  const TokenInterval& token_interval(std::size_t token) const {
    return tokens_.at(token);
  }

 private:
  void CheckRange(Frequency i) const {
    if (i < 0 || i > max_frequency()) {
      throw DataError("frequency " + std::to_string(i) +
                      " is beyond the sanitizer table (max_frequency " +
                      std::to_string(max_frequency()) + "); extend the table");
    }
  }

  PrivacyParams params_;
  SamplingScheme scheme_;
  TableConstruction construction_;
  std::vector<DiscreteDistribution> rows_;
  std::vector<TokenInterval> tokens_;
  std::vector<double> reported_;
};

// Stepwise table. Token j corresponds to the interval (j − 1, j].
inline SanitizerTable ComputePij(const PrivacyParams& params,
                                 const SamplingScheme& scheme,
                                 Frequency max_frequency) {
  if (max_frequency < 1) {
    throw std::invalid_argument("max_frequency must be >= 1");
  }
  const double up = std::exp(params.epsilon());
  const double down = std::exp(-params.epsilon());
  const double delta = params.delta();
  const auto m = static_cast<std::size_t>(max_frequency);

  std::vector<DiscreteDistribution> rows;
  rows.reserve(m + 1);
  rows.emplace_back(std::vector<double>{1.0});

  std::vector<double> prev{1.0};
  std::vector<double> prev_prefix;  // prev_prefix[j] = Σ_{h=1}^{j} prev[h]
  double pi_prev = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    const double pi_i = NextReportingProb(
        params, pi_prev, scheme.InclusionProb(static_cast<Frequency>(i)));

    prev_prefix.assign(i, 0.0);
    for (std::size_t j = 1; j < i; ++j) {
      prev_prefix[j] = prev_prefix[j - 1] + prev[j];
    }

    std::vector<double> cur(i + 1, 0.0);
    cur[0] = 1.0 - pi_i;

    // Lower bounds: the least mass tokens 1..j must hold so that
    // Pr_{i−1}[J ≤ j] ≤ e^ε Pr_i[J ≤ j] + δ.
    const double atom_term = std::max(0.0, down * prev[0] - cur[0]);
    double placed = 0.0;
    for (std::size_t j = 1; j < i; ++j) {
      const double v = down * (prev_prefix[j] - delta) - placed + atom_term;
      cur[j] = std::max(v, 0.0);
      placed += cur[j];
    }

    // Push the rest of π_i to the top tokens, each up to the cap
    //   U = e^ε Σ_{h≥j} π_{i−1,h} + δ − Σ_{h>j} π_{i,h}.
    double remaining = pi_i - placed;
    double above = 0.0;
    for (std::size_t j = i; j >= 1; --j) {
      if (remaining <= 0.0) break;
      const double cap =
          up * (prev_prefix[i - 1] - prev_prefix[j - 1]) + delta - above;
      if (cap - cur[j] <= remaining) {
        remaining -= cap - cur[j];
        cur[j] = cap;
      } else {
        cur[j] += remaining;
        remaining = 0.0;
      }
      above += cur[j];
    }

    rows.emplace_back(cur);
    prev = std::move(cur);
    pi_prev = pi_i;
  }

  std::vector<TokenInterval> tokens(m + 1);
  for (std::size_t j = 1; j <= m; ++j) {
    tokens[j] = {static_cast<double>(j) - 1.0, static_cast<double>(j)};
  }
  return SanitizerTable(params, scheme, TableConstruction::kStepwise,
                        std::move(rows), std::move(tokens));
}

struct Segment {
  double left = 0.0;
  double right = 0.0;
  double density = 0.0;

  double mass() const { return (right - left) * density; }
};

// Sanitized-frequency law for one true frequency: an atom at 0 (not
// reported) and a piecewise-constant density on sorted, adjacent segments.
struct PiecewisePdf {
  double atom0 = 1.0;
  std::vector<Segment> segments;

  double reported_mass() const {
    double m = 0.0;
    for (const auto& s : segments) m += s.mass();
    return m;
  }
  double total_mass() const { return atom0 + reported_mass(); }
};

struct PdfSequence {
  PrivacyParams params;
  SamplingScheme scheme;
  std::vector<PiecewisePdf> pdfs;  // pdfs[i] is the law for frequency i.
};

// How the atom enters the downward budget when locating the lower-bound
// breakpoint b_i.
enum class AtomAccounting {
  // max{0, f_{i−1}(0) − e^ε f_i(0)}: the atom's actual contribution to the
  // downward hockey-stick divergence.
  kExact,
  // max{0, e^{−ε} f_{i−1}(0) − f_i(0)}. Exceeds δ by up to δ(1 − e^{−ε})
  // whenever the downward reporting bound is tight; kept for comparison only.
  kAsPrinted,
};

namespace internal {

inline std::vector<Segment> SplitAt(const std::vector<Segment>& segments,
                                    double z) {
  std::vector<Segment> out;
  out.reserve(segments.size() + 1);
  for (const auto& s : segments) {
    if (s.left < z && z < s.right) {
      out.push_back({s.left, z, s.density});
      out.push_back({z, s.right, s.density});
    } else {
      out.push_back(s);
    }
  }
  return out;
}

// Merges neighbours whose densities agree to relative 1e-12, keeping mass.
inline void MergeEqualDensities(std::vector<Segment>& segments) {
  std::vector<Segment> out;
  out.reserve(segments.size());
  for (const auto& s : segments) {
    if (!out.empty()) {
      Segment& last = out.back();
      const double scale = std::max(last.density, s.density);
      if (std::abs(last.density - s.density) <= 1e-12 * scale) {
        const double mass = last.mass() + s.mass();
        last.right = s.right;
        last.density = mass / (last.right - last.left);
        continue;
      }
    }
    out.push_back(s);
  }
  segments = std::move(out);
}

}  // namespace internal

inline PdfSequence ComputePdfs(const PrivacyParams& params,
                               const SamplingScheme& scheme,
                               Frequency max_frequency,
                               AtomAccounting accounting = AtomAccounting::kExact) {
  if (max_frequency < 1) {
    throw std::invalid_argument("max_frequency must be >= 1");
  }
  constexpr double kTolerance = 1e-12;
  const double up = std::exp(params.epsilon());
  const double down = std::exp(-params.epsilon());
  const double delta = params.delta();

  PdfSequence seq{params, scheme, {}};
  seq.pdfs.reserve(static_cast<std::size_t>(max_frequency) + 1);
  seq.pdfs.push_back(PiecewisePdf{1.0, {}});

  double pi_prev = 0.0;
  for (Frequency i = 1; i <= max_frequency; ++i) {
    const double pi_i =
        NextReportingProb(params, pi_prev, scheme.InclusionProb(i));
    const double top = std::min(pi_i, delta);
    const double hi_end = static_cast<double>(i);
    const double lo_end = hi_end - 1.0;
    const PiecewisePdf& prev = seq.pdfs.back();

    PiecewisePdf cur;
    cur.atom0 = 1.0 - pi_i;

    if (!prev.segments.empty()) {
      const double prev_mass = prev.reported_mass();
      const double atom_cost =
          accounting == AtomAccounting::kExact
              ? std::max(0.0, prev.atom0 - up * cur.atom0)
              : std::max(0.0, down * prev.atom0 - cur.atom0);

      // b: f_L is zero on (0, b] and e^{−ε} f_{i−1} above it. Smallest z with
      // atom_cost + ∫_0^z f_{i−1} = δ.
      double b = lo_end;
      if (atom_cost + prev_mass > delta) {
        const double need = std::max(0.0, delta - atom_cost);
        double acc = 0.0;
        for (const auto& s : prev.segments) {
          if (acc >= need) {
            b = s.left;
            break;
          }
          const double m = s.mass();
          if (acc + m >= need) {
            b = std::clamp(s.left + (need - acc) / s.density, s.left, s.right);
            break;
          }
          acc += m;
        }
      }
      const std::vector<Segment> pieces = internal::SplitAt(prev.segments, b);
      auto lower_density = [&](const Segment& s) {
        return s.right <= b ? 0.0 : down * s.density;
      };

      // c: smallest z with ∫_0^z f_L + e^ε ∫_z^{i−1} f_{i−1} = π_i − top.
      // The left side is continuous and non-increasing in z.
      const double target = pi_i - top;
      double g = up * prev_mass;
      double c = -1.0;
      if (g < target - kTolerance) {
        std::ostringstream msg;
        msg << "no crossover for frequency " << i << ": e^eps * mass(f_"
            << i - 1 << ") = " << g << " < target " << target;
        throw std::runtime_error(msg.str());
      }
      for (const auto& s : pieces) {
        if (g <= target) {
          c = s.left;
          break;
        }
        const double slope = lower_density(s) - up * s.density;
        const double g_right = g + slope * (s.right - s.left);
        if (g_right <= target) {
          c = std::clamp(s.left + (target - g) / slope, s.left, s.right);
          break;
        }
        g = g_right;
      }
      if (c < 0.0) {
        if (g > target + kTolerance) {
          std::ostringstream msg;
          msg << "no crossover for frequency " << i << ": lower bound mass "
              << g << " exceeds target " << target;
          throw std::runtime_error(msg.str());
        }
        c = lo_end;
      }

      for (const auto& s : internal::SplitAt(pieces, c)) {
        const double d = s.right <= c ? lower_density(s) : up * s.density;
        cur.segments.push_back({s.left, s.right, d});
      }
    }
    cur.segments.push_back({lo_end, hi_end, top});
    internal::MergeEqualDensities(cur.segments);

    seq.pdfs.push_back(std::move(cur));
    pi_prev = pi_i;
  }
  return seq;
}

// Sorted union of all segment endpoints, including 0.
inline std::vector<double> Breakpoints(std::span<const PiecewisePdf> pdfs) {
  std::vector<double> points{0.0};
  for (const auto& pdf : pdfs) {
    for (const auto& s : pdf.segments) {
      points.push_back(s.left);
      points.push_back(s.right);
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

// One token per interval between consecutive breakpoints; every density is
// constant on each token, so masses and divergences carry over exactly.
inline SanitizerTable DiscretizePdfs(const PrivacyParams& params,
                                     const SamplingScheme& scheme,
                                     std::span<const PiecewisePdf> pdfs) {
  if (pdfs.empty()) throw std::invalid_argument("no pdfs to discretize");
  const std::vector<double> points = Breakpoints(pdfs);
  auto index_of = [&](double x) {
    return static_cast<std::size_t>(
        std::lower_bound(points.begin(), points.end(), x) - points.begin());
  };

  std::vector<DiscreteDistribution> rows;
  rows.reserve(pdfs.size());
  for (const auto& pdf : pdfs) {
    const std::size_t width =
        pdf.segments.empty() ? 1 : index_of(pdf.segments.back().right) + 1;
    std::vector<double> row(width, 0.0);
    row[0] = pdf.atom0;
    for (const auto& s : pdf.segments) {
      const std::size_t first = index_of(s.left) + 1;
      const std::size_t last = index_of(s.right);
      for (std::size_t t = first; t <= last; ++t) {
        row[t] = s.density * (points[t] - points[t - 1]);
      }
    }
    rows.emplace_back(std::move(row));
  }

  std::vector<TokenInterval> tokens(points.size());
  for (std::size_t t = 1; t < points.size(); ++t) {
    tokens[t] = {points[t - 1], points[t]};
  }
  return SanitizerTable(params, scheme, TableConstruction::kDiscretizedPdf,
                        std::move(rows), std::move(tokens));
}

inline SanitizerTable DiscretizePdfs(const PdfSequence& seq) {
  return DiscretizePdfs(seq.params, seq.scheme, seq.pdfs);
}

// Piecewise-constant construction, discretized.
inline SanitizerTable ComputeDiscretizedPdfTable(const PrivacyParams& params,
                                                 const SamplingScheme& scheme,
                                                 Frequency max_frequency) {
  return DiscretizePdfs(ComputePdfs(params, scheme, max_frequency));
}

// Stepwise table when nothing is sampled away, discretized densities
// otherwise.
inline SanitizerTable DefaultSanitizerTable(const PrivacyParams& params,
                                            const SamplingScheme& scheme,
                                            Frequency max_frequency) {
  return scheme.kind() == SchemeKind::kNone
             ? ComputePij(params, scheme, max_frequency)
             : ComputeDiscretizedPdfTable(params, scheme, max_frequency);
}

using KeyToken = KeyValue<std::size_t>;

// Draws a token for each sampled key from p_{w,•} = π_{w,•}/q_w; keys drawn
// as token 0 are dropped.
inline std::vector<KeyToken> SanitizeFrequencies(const WeightedSample& sample,
                                                 const SanitizerTable& table,
                                                 std::uint64_t seed) {
  if (table.construction() != TableConstruction::kImported &&
      !(sample.scheme == table.scheme())) {
    throw std::invalid_argument(
        "sanitizer table was computed for a different sampling scheme");
  }
  std::vector<KeyToken> out;
  for (const auto& [key, w] : sample.pairs) {
    if (w > table.max_frequency()) {
      throw DataError("key '" + key + "' has frequency " + std::to_string(w) +
                      " beyond the sanitizer table (max_frequency " +
                      std::to_string(table.max_frequency()) +
                      "); extend the table");
    }
    const double q = sample.scheme.InclusionProb(w);
    if (q <= 0.0) {
      throw DataError("key '" + key + "' was sampled at frequency " +
                      std::to_string(w) +
                      " which has zero sampling probability");
    }
    const auto probs = table.row(w).probs();
    KeyStream stream(seed, key, StreamPurpose::kFrequencySanitizer);
    const double u = stream.Uniform() * q;
    double cumulative = 0.0;
    for (std::size_t j = 1; j < probs.size(); ++j) {
      cumulative += probs[j];
      if (u < cumulative) {
        out.push_back({key, j});
        break;
      }
    }
  }
  return out;
}

}  // namespace pws

#endif  // PWS_FREQUENCY_SANITIZER_HPP_
