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

// Exact comparison harness: synthetic frequency distributions, expected
// reporting sweeps and NRMSE sweeps. No simulation anywhere.

#ifndef PWS_EXPERIMENTS_HPP_
#define PWS_EXPERIMENTS_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pws/common.hpp"
#include "pws/estimators.hpp"
#include "pws/frequency_sanitizer.hpp"
#include "pws/key_sanitizer.hpp"
#include "pws/privacy.hpp"
#include "pws/sampling.hpp"
#include "pws/sbh.hpp"

namespace pws {

// Rank r ∈ 1..n gets frequency max(1, round(w_max · r^{−α})).
inline FrequencyHistogram ZipfHistogram(std::int64_t n_keys, double alpha,
                                        Frequency w_max) {
  if (n_keys < 1 || w_max < 1 || !(alpha >= 0.0)) {
    throw std::invalid_argument(
        "zipf needs n_keys >= 1, w_max >= 1 and alpha >= 0");
  }
  FrequencyHistogram h;
  for (std::int64_t r = 1; r <= n_keys; ++r) {
    const double w = std::round(static_cast<double>(w_max) *
                                std::pow(static_cast<double>(r), -alpha));
    h.Add(std::max<Frequency>(1, static_cast<Frequency>(w)));
  }
  return h;
}

// Expected histogram of n keys with frequencies uniform on [lo, hi]; any
// remainder goes to the lowest frequencies, one key each.
inline FrequencyHistogram UniformHistogram(std::int64_t n_keys, Frequency lo,
                                           Frequency hi) {
  if (n_keys < 1 || lo < 1 || hi < lo) {
    throw std::invalid_argument("uniform needs n_keys >= 1 and 1 <= lo <= hi");
  }
  const std::int64_t width = hi - lo + 1;
  FrequencyHistogram h;
  for (Frequency f = lo; f <= hi; ++f) {
    h.Add(f, n_keys / width + ((f - lo) < n_keys % width ? 1 : 0));
  }
  return h;
}

// Σ count_i p_i / Σ count_i.
inline double ExpectedReportedFraction(
    const FrequencyHistogram& population,
    const std::function<double(Frequency)>& report_prob) {
  std::vector<double> terms;
  for (const auto& [f, c] : population.counts()) {
    terms.push_back(static_cast<double>(c) * report_prob(f));
  }
  const auto n = static_cast<double>(population.total_keys());
  if (n == 0.0) throw std::invalid_argument("empty population");
  return PairwiseSum(terms) / n;
}

inline const std::vector<double>& DefaultDeltaGrid() {
  static const std::vector<double> grid{1.0,  1e-1, 1e-2, 1e-3, 1e-4,
                                        1e-5, 1e-6, 1e-7, 1e-8};
  return grid;
}

inline const std::vector<double>& DefaultTauGrid() {
  static const std::vector<double> grid{
      1.0,  0.5,  0.2,  0.1,  0.05, 0.02, 0.01, 5e-3, 2e-3, 1e-3, 5e-4,
      2e-4, 1e-4, 5e-5, 2e-5, 1e-5};
  return grid;
}

enum class Method { kPwsKeys, kPwsFreqMle, kSbh, kSampledSbh, kNonPrivate };

inline std::string MethodName(Method m) {
  switch (m) {
    case Method::kPwsKeys:
      return "pws-keys";
    case Method::kPwsFreqMle:
      return "pws-freq-mle";
    case Method::kSbh:
      return "sbh";
    case Method::kSampledSbh:
      return "sampled-sbh";
    case Method::kNonPrivate:
      return "nonprivate";
  }
  return "";
}

inline Method ParseMethod(const std::string& name) {
  for (Method m : {Method::kPwsKeys, Method::kPwsFreqMle, Method::kSbh,
                   Method::kSampledSbh, Method::kNonPrivate}) {
    if (MethodName(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + name + "'");
}

enum class SweepVariable { kDelta, kTau, kFrequency };

inline std::string SweepVariableName(SweepVariable v) {
  switch (v) {
    case SweepVariable::kDelta:
      return "delta";
    case SweepVariable::kTau:
      return "tau";
    case SweepVariable::kFrequency:
      return "frequency";
  }
  return "";
}

// Frequency-sanitizer table used for pws-freq-mle.
enum class TableChoice { kDefault, kStepwise, kDiscretizedPdf };

inline SanitizerTable BuildTable(TableChoice choice,
                                 const PrivacyParams& params,
                                 const SamplingScheme& scheme,
                                 Frequency max_frequency) {
  switch (choice) {
    case TableChoice::kStepwise:
      return ComputePij(params, scheme, max_frequency);
    case TableChoice::kDiscretizedPdf:
      return ComputeDiscretizedPdfTable(params, scheme, max_frequency);
    case TableChoice::kDefault:
      break;
  }
  return DefaultSanitizerTable(params, scheme, max_frequency);
}

struct SweepConfig {
  SweepVariable variable = SweepVariable::kDelta;
  // δ or τ values; for a frequency sweep, the frequencies.
  std::vector<double> grid;
  FrequencyHistogram population;
  std::vector<Method> methods;
  PrivacyParams params{0.1, 0.01};
  SamplingScheme scheme = SamplingScheme::None();
  FrequencyFunction g = FrequencyFunction::Identity();
  TableChoice table = TableChoice::kDefault;
  std::size_t threads = 1;
};

struct SweepRow {
  std::string sweep_var;
  double value = 0.0;
  std::string method;
  std::string metric;
  std::optional<double> result;  // nullopt: undefined at this grid point
};

// Rows past the population's largest frequency that the MLE argmax and the
// table need so that high frequencies are not truncated.
inline Frequency TableMargin(const PrivacyParams& params) {
  return 4 * static_cast<Frequency>(std::ceil(LValue(params)));
}

namespace internal {

inline SamplingScheme WithTau(const SamplingScheme& scheme, double tau) {
  switch (scheme.kind()) {
    case SchemeKind::kNone:
      throw std::invalid_argument("a tau sweep needs a ppswor or pps scheme");
    case SchemeKind::kPpswor:
      return SamplingScheme::Ppswor(tau, scheme.weight());
    case SchemeKind::kPps:
      return SamplingScheme::Pps(tau, scheme.weight());
  }
  return scheme;
}

inline double SbhReportFor(Method m, const PrivacyParams& params,
                           const SamplingScheme& scheme, Frequency i) {
  if (m == Method::kSbh) return SbhReportProb(params, static_cast<double>(i));
  return SampledSbhReportProb(params, scheme, static_cast<double>(i));
}

// Expected reported fraction of one method at one setting.
inline double ReportedFraction(Method m, const PrivacyParams& params,
                               const SamplingScheme& scheme,
                               const FrequencyHistogram& population) {
  const Frequency top = population.max_frequency();
  switch (m) {
    case Method::kPwsKeys:
    case Method::kPwsFreqMle: {
      const ReportingVector rv = ComputePi(params, scheme, top);
      return ExpectedReportedFraction(population,
                                      [&](Frequency i) { return rv.pi(i); });
    }
    case Method::kSbh:
    case Method::kSampledSbh:
      return ExpectedReportedFraction(population, [&](Frequency i) {
        return SbhReportFor(m, params, scheme, i);
      });
    case Method::kNonPrivate:
      return ExpectedReportedFraction(
          population, [&](Frequency i) { return scheme.InclusionProb(i); });
  }
  return 0.0;
}

inline std::optional<double> Ratio(double num, double den) {
  if (den == 0.0 || !std::isfinite(num / den)) return std::nullopt;
  return num / den;
}

// report_prob, bias_over_g and nrmse_per_key rows for one frequency.
inline std::vector<SweepRow> FrequencyRows(const SweepConfig& c, Frequency i,
                                           const SanitizerTable* table,
                                           const EstimatorCoeffs* mle) {
  const std::string var = SweepVariableName(c.variable);
  const auto value = static_cast<double>(i);
  const double gi = c.g(value);
  std::vector<SweepRow> rows;
  auto add_moments = [&](const std::string& name, const PerKeyMoments& mo) {
    rows.push_back({var, value, name, "bias_over_g", Ratio(mo.bias, gi)});
    rows.push_back(
        {var, value, name, "nrmse_per_key", Ratio(std::sqrt(mo.mse), gi)});
  };
  for (Method m : c.methods) {
    const std::string name = MethodName(m);
    switch (m) {
      case Method::kPwsKeys: {
        const ReportingVector rv = ComputePi(c.params, c.scheme, i);
        rows.push_back({var, value, name, "report_prob", rv.pi(i)});
        break;
      }
      case Method::kPwsFreqMle:
        rows.push_back(
            {var, value, name, "report_prob", table->reported_mass(i)});
        add_moments(name, ComputePerKeyMoments(*table, *mle, i));
        break;
      case Method::kSbh:
        rows.push_back({var, value, name, "report_prob",
                        SbhReportFor(m, c.params, c.scheme, i)});
        add_moments(name, SbhMoments(c.params, SamplingScheme::None(), c.g, i));
        break;
      case Method::kSampledSbh:
        rows.push_back({var, value, name, "report_prob",
                        SbhReportFor(m, c.params, c.scheme, i)});
        add_moments(name, SbhMoments(c.params, c.scheme, c.g, i));
        break;
      case Method::kNonPrivate:
        rows.push_back(
            {var, value, name, "report_prob", c.scheme.InclusionProb(i)});
        add_moments(name, InverseProbMoments(c.scheme, c.g, i));
        break;
    }
  }
  return rows;
}

}  // namespace internal

// Delta and tau sweeps report the expected reported fraction of the
// population; a frequency sweep reports per-key reporting probability,
// normalized bias and per-key NRMSE.
inline std::vector<SweepRow> RunSweep(const SweepConfig& c) {
  if (c.grid.empty()) throw std::invalid_argument("empty sweep grid");
  if (c.methods.empty()) throw std::invalid_argument("no methods to compare");
  const std::string var = SweepVariableName(c.variable);

  if (c.variable == SweepVariable::kFrequency) {
    Frequency top = 1;
    for (double v : c.grid) {
      if (!(v >= 1.0) || std::round(v) != v) {
        throw std::invalid_argument("frequency grid needs integers >= 1");
      }
      top = std::max(top, static_cast<Frequency>(v));
    }
    std::optional<SanitizerTable> table;
    std::optional<EstimatorCoeffs> mle;
    for (Method m : c.methods) {
      if (m != Method::kPwsFreqMle) continue;
      const Frequency rows = top + TableMargin(c.params);
      table = BuildTable(c.table, c.params, c.scheme, rows);
      mle = MleCoeffs(*table, ComputePi(c.params, c.scheme, rows), c.g);
    }
    const auto per_point = ParallelMap(c.grid.size(), c.threads, [&](std::size_t k) {
      return internal::FrequencyRows(c, static_cast<Frequency>(c.grid[k]),
                                     table ? &*table : nullptr,
                                     mle ? &*mle : nullptr);
    });
    std::vector<SweepRow> out;
    for (const auto& rows : per_point) out.insert(out.end(), rows.begin(), rows.end());
    return out;
  }

  if (c.population.empty()) throw std::invalid_argument("empty population");
  const auto per_point = ParallelMap(c.grid.size(), c.threads, [&](std::size_t k) {
    const double v = c.grid[k];
    const PrivacyParams params = c.variable == SweepVariable::kDelta
                                     ? PrivacyParams(c.params.epsilon(), v)
                                     : c.params;
    const SamplingScheme scheme = c.variable == SweepVariable::kTau
                                      ? internal::WithTau(c.scheme, v)
                                      : c.scheme;
    std::vector<SweepRow> rows;
    for (Method m : c.methods) {
      rows.push_back({var, v, MethodName(m), "reported_fraction",
                      internal::ReportedFraction(m, params, scheme,
                                                 c.population)});
    }
    return rows;
  });
  std::vector<SweepRow> out;
  for (const auto& rows : per_point) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

struct NrmseConfig {
  std::vector<double> tau_grid = DefaultTauGrid();
  // Selected keys; every key has weight L(x) = 1.
  FrequencyHistogram selection = UniformHistogram(200000, 1, 200);
  PrivacyParams params{0.1, 0.01};
  // τ = 1 is no sampling only under PPS with f(w) = w.
  SamplingScheme scheme = SamplingScheme::Pps(1.0);
  FrequencyFunction g = FrequencyFunction::Identity();
  std::size_t threads = 1;
};

// Name of the extra series that uses the stepwise table at grid points where
// every frequency is sampled with probability 1.
inline constexpr const char* kPwsFreqMleStepwise = "pws-freq-mle-alg4";

// NRMSE of the statistic Σ g(w_x) over the selection for pws-freq-mle
// (discretized density table), sampled-sbh and nonprivate at each τ.
inline std::vector<SweepRow> NrmseExperiment(const NrmseConfig& c) {
  if (c.tau_grid.empty()) throw std::invalid_argument("empty tau grid");
  if (c.selection.empty()) throw std::invalid_argument("empty selection");
  const auto groups = SelectAll(c.selection);
  const Frequency rows = c.selection.max_frequency() + TableMargin(c.params);

  const auto per_point = ParallelMap(c.tau_grid.size(), c.threads, [&](std::size_t k) {
    const double tau = c.tau_grid[k];
    const SamplingScheme scheme = internal::WithTau(c.scheme, tau);
    const ReportingVector rv = ComputePi(c.params, scheme, rows);
    std::vector<SweepRow> out;
    auto emit = [&](const std::string& method, const StatisticMoments& s) {
      out.push_back({"tau", tau, method, "nrmse", s.nrmse});
    };

    const SanitizerTable table =
        ComputeDiscretizedPdfTable(c.params, scheme, rows);
    const EstimatorCoeffs mle = MleCoeffs(table, rv, c.g);
    emit(MethodName(Method::kPwsFreqMle),
         ComputeStatisticMoments(groups, c.g, [&](Frequency i) {
           return ComputePerKeyMoments(table, mle, i);
         }));

    bool all_sampled = true;
    for (Frequency i = 1; i <= rows && all_sampled; ++i) {
      all_sampled = scheme.InclusionProb(i) >= 1.0;
    }
    if (all_sampled) {
      const SanitizerTable stepwise = ComputePij(c.params, scheme, rows);
      const EstimatorCoeffs mle4 = MleCoeffs(stepwise, rv, c.g);
      emit(kPwsFreqMleStepwise,
           ComputeStatisticMoments(groups, c.g, [&](Frequency i) {
             return ComputePerKeyMoments(stepwise, mle4, i);
           }));
    }

    emit(MethodName(Method::kSampledSbh),
         ComputeStatisticMoments(groups, c.g, [&](Frequency i) {
           return SbhMoments(c.params, scheme, c.g, i);
         }));
    emit(MethodName(Method::kNonPrivate),
         ComputeStatisticMoments(groups, c.g, [&](Frequency i) {
           return InverseProbMoments(scheme, c.g, i);
         }));
    return out;
  });
  std::vector<SweepRow> out;
  for (const auto& r : per_point) out.insert(out.end(), r.begin(), r.end());
  return out;
}

// Result of one series in a sweep, in grid order.
inline std::vector<std::optional<double>> SeriesOf(
    std::span<const SweepRow> rows, const std::string& method,
    const std::string& metric) {
  std::vector<std::optional<double>> out;
  for (const auto& r : rows) {
    if (r.method == method && r.metric == metric) out.push_back(r.result);
  }
  return out;
}

}  // namespace pws

#endif  // PWS_EXPERIMENTS_HPP_
