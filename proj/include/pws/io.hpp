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

// Text formats: TSV key-value data and CSV tables. Reals are written with
// 17 significant digits so that every double round-trips exactly.

#ifndef PWS_IO_HPP_
#define PWS_IO_HPP_

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "pws/common.hpp"
#include "pws/estimators.hpp"
#include "pws/experiments.hpp"
#include "pws/frequency_sanitizer.hpp"
#include "pws/key_sanitizer.hpp"
#include "pws/privacy.hpp"
#include "pws/sampling.hpp"

namespace pws {

inline std::string FormatReal(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace internal {

inline std::string Where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

inline double ParseReal(std::string_view s, std::string_view source,
                        std::size_t line) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    throw DataError(Where(source, line) + ": not a number: '" +
                    std::string(s) + "'");
  }
  return v;
}

inline std::int64_t ParseInt(std::string_view s, std::string_view source,
                             std::size_t line) {
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    throw DataError(Where(source, line) + ": not an integer: '" +
                    std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Calls fn(fields, line_number) for each data line. Blank lines and lines
// starting with '#' are skipped; a first line equal to `header` is skipped.
template <typename Fn>
void ForEachRecord(std::istream& in, char sep, std::size_t fields,
                   std::string_view header, std::string_view source, Fn fn) {
  std::string line;
  std::size_t number = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (first) {
      first = false;
      if (!header.empty() && line == header) continue;
    }
    const auto parts = Split(line, sep);
    if (parts.size() != fields) {
      throw DataError(Where(source, number) + ": expected " +
                      std::to_string(fields) + " fields, got " +
                      std::to_string(parts.size()));
    }
    fn(parts, number);
  }
}

}  // namespace internal

// `key<TAB>frequency` per line. Duplicate keys are an error.
inline KeyedHistogram ReadKeyFrequencies(std::istream& in,
                                         std::string_view source = "input") {
  KeyedHistogram h;
  internal::ForEachRecord(
      in, '\t', 2, "", source, [&](const auto& f, std::size_t line) {
        const std::int64_t w = internal::ParseInt(f[1], source, line);
        if (w < 1) {
          throw DataError(internal::Where(source, line) +
                          ": frequency must be >= 1");
        }
        if (f[0].empty()) {
          throw DataError(internal::Where(source, line) + ": empty key");
        }
        try {
          h.Add(std::string(f[0]), w);
        } catch (const DataError& e) {
          throw DataError(internal::Where(source, line) + ": " + e.what());
        }
      });
  return h;
}

inline void WriteKeyFrequencies(std::ostream& out,
                                std::span<const KeyFrequency> data) {
  for (const auto& [key, w] : data) out << key << '\t' << w << '\n';
}

// One key per line; each line is one element.
inline KeyedHistogram ReadElementStream(std::istream& in) {
  KeyedHistogram h;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    h.Accumulate(line);
  }
  return h;
}

inline void WriteKeys(std::ostream& out, std::span<const std::string> keys) {
  for (const auto& k : keys) out << k << '\n';
}

inline void WriteKeyTokens(std::ostream& out,
                           std::span<const KeyToken> tokens) {
  for (const auto& [key, j] : tokens) out << key << '\t' << j << '\n';
}

inline std::vector<KeyToken> ReadKeyTokens(std::istream& in,
                                           std::string_view source = "input") {
  std::vector<KeyToken> out;
  internal::ForEachRecord(
      in, '\t', 2, "", source, [&](const auto& f, std::size_t line) {
        const std::int64_t j = internal::ParseInt(f[1], source, line);
        if (j < 1) {
          throw DataError(internal::Where(source, line) +
                          ": released tokens must be >= 1");
        }
        out.push_back({std::string(f[0]), static_cast<std::size_t>(j)});
      });
  return out;
}

inline void WriteKeyReals(std::ostream& out,
                          std::span<const KeyValue<double>> data) {
  for (const auto& [key, v] : data) out << key << '\t' << FormatReal(v) << '\n';
}

inline std::vector<KeyValue<double>> ReadKeyReals(
    std::istream& in, std::string_view source = "input") {
  std::vector<KeyValue<double>> out;
  internal::ForEachRecord(
      in, '\t', 2, "", source, [&](const auto& f, std::size_t line) {
        out.push_back(
            {std::string(f[0]), internal::ParseReal(f[1], source, line)});
      });
  return out;
}

// `key<TAB>weight`; keys not listed have weight 0.
inline std::map<std::string, double, std::less<>> ReadKeyWeights(
    std::istream& in, std::string_view source = "input") {
  std::map<std::string, double, std::less<>> out;
  internal::ForEachRecord(
      in, '\t', 2, "", source, [&](const auto& f, std::size_t line) {
        if (!out.emplace(std::string(f[0]),
                         internal::ParseReal(f[1], source, line))
                 .second) {
          throw DataError(internal::Where(source, line) + ": duplicate key '" +
                          std::string(f[0]) + "'");
        }
      });
  return out;
}

inline constexpr std::string_view kPiHeader = "i,q_i,pi_i,p_i";

inline void WriteReportingVector(std::ostream& out, const ReportingVector& rv) {
  out << kPiHeader << '\n';
  for (Frequency i = 1; i <= rv.max_frequency(); ++i) {
    const double q = rv.q(i);
    out << i << ',' << FormatReal(q) << ',' << FormatReal(rv.pi(i)) << ','
        << (q > 0.0 ? FormatReal(rv.keep_prob(i)) : std::string("undefined"))
        << '\n';
  }
}

inline constexpr std::string_view kTableHeader = "i,j,pi_ij";

// Every stored entry of rows 1..m, token 0 included.
inline void WriteTable(std::ostream& out, const SanitizerTable& table) {
  out << kTableHeader << '\n';
  for (Frequency i = 1; i <= table.max_frequency(); ++i) {
    const auto row = table.row(i).probs();
    for (std::size_t j = 0; j < row.size(); ++j) {
      out << i << ',' << j << ',' << FormatReal(row[j]) << '\n';
    }
  }
}

// Rows as probability vectors indexed by token; row 0 is the point mass on
// token 0. Missing entries are zero; rows must be contiguous from 1.
inline std::vector<DiscreteDistribution> ReadTableRows(
    std::istream& in, std::string_view source = "input") {
  std::vector<std::vector<double>> rows{{1.0}};
  internal::ForEachRecord(
      in, ',', 3, kTableHeader, source, [&](const auto& f, std::size_t line) {
        const std::int64_t i = internal::ParseInt(f[0], source, line);
        const std::int64_t j = internal::ParseInt(f[1], source, line);
        const double p = internal::ParseReal(f[2], source, line);
        if (i < 1 || j < 0) {
          throw DataError(internal::Where(source, line) +
                          ": need i >= 1 and j >= 0");
        }
        const auto ii = static_cast<std::size_t>(i);
        const auto jj = static_cast<std::size_t>(j);
        if (ii > rows.size()) {
          throw DataError(internal::Where(source, line) + ": row " +
                          std::to_string(i) + " follows row " +
                          std::to_string(rows.size() - 1));
        }
        if (ii == rows.size()) rows.emplace_back();
        auto& row = rows[ii];
        if (row.size() <= jj) row.resize(jj + 1, 0.0);
        row[jj] = p;
      });
  std::vector<DiscreteDistribution> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      out.emplace_back(std::move(rows[i]));
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string(source) + ": row " + std::to_string(i) +
                      ": " + e.what());
    }
  }
  return out;
}

// Table read back for use with a given mechanism configuration.
inline SanitizerTable ReadTable(std::istream& in, const PrivacyParams& params,
                                const SamplingScheme& scheme,
                                std::string_view source = "input") {
  auto rows = ReadTableRows(in, source);
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.size());
  std::vector<TokenInterval> tokens(width);
  return SanitizerTable(params, scheme, TableConstruction::kImported,
                        std::move(rows), std::move(tokens));
}

inline constexpr std::string_view kPdfHeader = "i,left,right,density";
inline constexpr std::string_view kAtomHeader = "i,atom0";

inline void WritePdfs(std::ostream& out, std::span<const PiecewisePdf> pdfs) {
  out << kPdfHeader << '\n';
  for (std::size_t i = 1; i < pdfs.size(); ++i) {
    for (const auto& s : pdfs[i].segments) {
      out << i << ',' << FormatReal(s.left) << ',' << FormatReal(s.right)
          << ',' << FormatReal(s.density) << '\n';
    }
  }
}

inline void WriteAtoms(std::ostream& out, std::span<const PiecewisePdf> pdfs) {
  out << kAtomHeader << '\n';
  for (std::size_t i = 1; i < pdfs.size(); ++i) {
    out << i << ',' << FormatReal(pdfs[i].atom0) << '\n';
  }
}

inline constexpr std::string_view kTokenHeader = "j,left,right";

inline void WriteTokenIntervals(std::ostream& out,
                                const SanitizerTable& table) {
  out << kTokenHeader << '\n';
  for (std::size_t j = 1; j < table.token_count(); ++j) {
    const auto& t = table.token_interval(j);
    out << j << ',' << FormatReal(t.left) << ',' << FormatReal(t.right)
        << '\n';
  }
}

inline constexpr std::string_view kMomentsHeader = "i,E_i,Bias_i,Var_i,MSE_i";

inline void WriteMoments(std::ostream& out,
                         std::span<const PerKeyMoments> moments) {
  out << kMomentsHeader << '\n';
  for (const auto& m : moments) {
    out << m.frequency << ',' << FormatReal(m.expectation) << ','
        << FormatReal(m.bias) << ',' << FormatReal(m.variance) << ','
        << FormatReal(m.mse) << '\n';
  }
}

inline constexpr std::string_view kSweepHeader =
    "sweep_var,value,method,metric,result";

inline void WriteSweep(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << r.sweep_var << ',' << FormatReal(r.value) << ',' << r.method << ','
        << r.metric << ','
        << (r.result ? FormatReal(*r.result) : std::string("undefined"))
        << '\n';
  }
}

struct ConcordanceRow {
  Frequency i1 = 0;
  Frequency i2 = 0;
  double concordance = 0.0;
};

inline constexpr std::string_view kConcordanceHeader = "i1,i2,concordance";

inline void WriteConcordance(std::ostream& out,
                             std::span<const ConcordanceRow> rows) {
  out << kConcordanceHeader << '\n';
  for (const auto& r : rows) {
    out << r.i1 << ',' << r.i2 << ',' << FormatReal(r.concordance) << '\n';
  }
}

}  // namespace pws

#endif  // PWS_IO_HPP_
