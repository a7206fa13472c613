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

// Command-line front end. Errors are reported as a single stderr line
// `error: <usage|data|internal>: <message>`; usage errors exit 2, data
// errors exit 1.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pws/pws.hpp"

namespace {

using pws::DataError;
using pws::Frequency;

// Raised for invalid flag values and combinations.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PrivacyFlags {
  double epsilon = 0.0;
  double delta = 0.0;
};

struct SchemeFlags {
  std::string scheme = "none";
  std::optional<double> tau;
  double weight_power = 1.0;
};

struct IoFlags {
  std::string input;
  std::string output = "-";
};

void AddPrivacy(CLI::App* cmd, PrivacyFlags& f, bool delta_required = true) {
  cmd->add_option("--epsilon", f.epsilon, "privacy parameter epsilon > 0")
      ->required();
  auto* d = cmd->add_option("--delta", f.delta, "privacy parameter 0 < delta <= 1");
  if (delta_required) d->required();
}

// Subcommands share one SchemeFlags, so each sets its own default only once
// it is selected.
void AddScheme(CLI::App* cmd, SchemeFlags& f, const std::string& fallback) {
  cmd->preparse_callback([&f, fallback](std::size_t) { f.scheme = fallback; });
  auto* opt = cmd->add_option("--scheme", f.scheme, "sampling scheme")
                  ->check(CLI::IsMember({"none", "ppswor", "pps"}));
  if (!fallback.empty()) opt->default_str(fallback);
  cmd->add_option("--tau", f.tau, "sampling threshold tau >= 0");
  cmd->add_option("--weight-power", f.weight_power,
                  "sampling weight f(w) = w^p, 0 <= p <= 2")
      ->capture_default_str();
}

void AddOutput(CLI::App* cmd, IoFlags& f) {
  cmd->add_option("-o,--output", f.output, "output path, - for stdout")
      ->capture_default_str();
}

void AddInput(CLI::App* cmd, IoFlags& f, const std::string& what) {
  cmd->add_option("-i,--input", f.input, what)->required();
}

pws::PrivacyParams MakeParams(const PrivacyFlags& f) {
  try {
    return pws::PrivacyParams(f.epsilon, f.delta);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

pws::SamplingScheme MakeScheme(const SchemeFlags& f) {
  try {
    const auto weight = pws::FrequencyFunction::Power(f.weight_power);
    if (f.scheme == "none") return pws::SamplingScheme::None();
    if (!f.tau) throw UsageError("--tau is required for scheme " + f.scheme);
    if (f.scheme == "ppswor") return pws::SamplingScheme::Ppswor(*f.tau, weight);
    return pws::SamplingScheme::Pps(*f.tau, weight);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// "identity", "count" or "power:<p>".
pws::FrequencyFunction ParseG(const std::string& spec) {
  if (spec == "identity") return pws::FrequencyFunction::Identity();
  if (spec == "count") return pws::FrequencyFunction::Power(0.0);
  if (spec.rfind("power:", 0) == 0) {
    try {
      return pws::FrequencyFunction::Power(std::stod(spec.substr(6)));
    } catch (const std::exception&) {
    }
  }
  throw UsageError("--g must be identity, count or power:<p>, got '" + spec +
                   "'");
}

std::vector<std::string> SplitList(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> ParseGrid(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : SplitList(s, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad grid value '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("empty grid");
  return out;
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

// Runs `write` against the chosen output; files are only created on success.
void WithOutput(const std::string& path,
                const std::function<void(std::ostream&)>& write) {
  if (path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ostringstream buffer;
  write(buffer);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << buffer.str();
  if (!out) throw DataError("write to '" + path + "' failed");
}

Frequency RequirePositive(Frequency m, const std::string& flag) {
  if (m < 1) throw UsageError(flag + " must be >= 1");
  return m;
}

pws::FrequencyHistogram ParseDistribution(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (kind == "zipf") {
      const auto v = ParseGrid(rest);
      if (v.size() != 3) throw UsageError("zipf:<n>,<alpha>,<w_max>");
      return pws::ZipfHistogram(static_cast<std::int64_t>(v[0]), v[1],
                                static_cast<Frequency>(v[2]));
    }
    if (kind == "uniform") {
      const auto v = ParseGrid(rest);
      if (v.size() != 3) throw UsageError("uniform:<n>,<lo>,<hi>");
      return pws::UniformHistogram(static_cast<std::int64_t>(v[0]),
                                   static_cast<Frequency>(v[1]),
                                   static_cast<Frequency>(v[2]));
    }
    if (kind == "file") {
      auto in = OpenInput(rest);
      return pws::ReadKeyFrequencies(in, rest).ToCounts();
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  throw UsageError("--dist must be zipf:..., uniform:... or file:<path>");
}

pws::TableChoice ParseTableChoice(const std::string& s) {
  if (s == "default") return pws::TableChoice::kDefault;
  if (s == "stepwise") return pws::TableChoice::kStepwise;
  return pws::TableChoice::kDiscretizedPdf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private weighted sampling: sanitizers, estimators and analysis"};
  app.set_config("--config", "", "read flags from a key = value file");
  app.require_subcommand(1);

  PrivacyFlags privacy;
  SchemeFlags scheme;
  IoFlags io;
  Frequency max_freq = 0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string table_kind = "default";
  std::string g_spec = "identity";

  auto add_threads = [&](CLI::App* cmd) {
    cmd->add_option("--threads", threads, "worker threads")
        ->check(CLI::Range(1, 1024))
        ->capture_default_str();
  };
  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "random seed")->required();
  };
  auto add_table_kind = [&](CLI::App* cmd) {
    cmd->add_option("--table-kind", table_kind,
                    "frequency table: default, stepwise or pdf")
        ->check(CLI::IsMember({"default", "stepwise", "pdf"}))
        ->capture_default_str();
  };

  // pi
  auto* pi_cmd = app.add_subcommand("pi", "key reporting probabilities");
  AddPrivacy(pi_cmd, privacy);
  AddScheme(pi_cmd, scheme, "none");
  pi_cmd->add_option("--max-freq", max_freq, "largest frequency")->required();
  AddOutput(pi_cmd, io);

  // pij
  auto* pij_cmd = app.add_subcommand("pij", "stepwise frequency table");
  AddPrivacy(pij_cmd, privacy);
  AddScheme(pij_cmd, scheme, "none");
  pij_cmd->add_option("--max-freq", max_freq, "largest frequency")->required();
  AddOutput(pij_cmd, io);

  // pdfs
  std::string atoms_out, table_out, tokens_out;
  bool as_printed = false;
  auto* pdfs_cmd = app.add_subcommand("pdfs", "piecewise-constant frequency densities");
  AddPrivacy(pdfs_cmd, privacy);
  AddScheme(pdfs_cmd, scheme, "none");
  pdfs_cmd->add_option("--max-freq", max_freq, "largest frequency")->required();
  pdfs_cmd->add_option("--atoms-out", atoms_out, "write atoms at 0 (i,atom0)");
  pdfs_cmd->add_option("--table-out", table_out, "write the discretized table");
  pdfs_cmd->add_option("--tokens-out", tokens_out, "write token intervals");
  pdfs_cmd->add_flag("--as-printed-atom", as_printed,
                     "use the literal atom term (not DP; for comparison)");
  AddOutput(pdfs_cmd, io);

  // sample
  std::string elements;
  auto* sample_cmd = app.add_subcommand("sample", "threshold weighted sample");
  auto* sample_in = sample_cmd->add_option("-i,--input", io.input, "key<TAB>frequency TSV");
  auto* sample_el = sample_cmd->add_option("--elements", elements,
                                           "element stream, one key per line");
  sample_in->excludes(sample_el);
  AddScheme(sample_cmd, scheme, "ppswor");
  add_seed(sample_cmd);
  AddOutput(sample_cmd, io);

  // sanitize
  std::string mode;
  std::string table_in;
  auto* sanitize_cmd = app.add_subcommand("sanitize", "sanitize a weighted sample");
  sanitize_cmd->add_option("--mode", mode, "keys or freqs")
      ->required()
      ->check(CLI::IsMember({"keys", "freqs"}));
  AddInput(sanitize_cmd, io, "sample as key<TAB>frequency TSV");
  AddPrivacy(sanitize_cmd, privacy);
  AddScheme(sanitize_cmd, scheme, "none");
  sanitize_cmd->add_option("--max-freq", max_freq,
                           "table size (default: largest sampled frequency)");
  sanitize_cmd->add_option("--table", table_in, "use an exported i,j,pi_ij table");
  add_table_kind(sanitize_cmd);
  add_seed(sanitize_cmd);
  AddOutput(sanitize_cmd, io);

  // estimate
  std::string weights_path;
  std::string estimator = "mle";
  auto* estimate_cmd = app.add_subcommand("estimate", "estimate a linear statistic");
  AddInput(estimate_cmd, io, "sanitized key<TAB>token TSV");
  AddPrivacy(estimate_cmd, privacy);
  AddScheme(estimate_cmd, scheme, "none");
  estimate_cmd->add_option("--max-freq", max_freq,
                           "table size used when sanitizing")
      ->required();
  estimate_cmd->add_option("--weights", weights_path,
                           "key<TAB>weight predicate file (default: all 1)");
  estimate_cmd->add_option("--estimator", estimator, "mle or unbiased")
      ->check(CLI::IsMember({"mle", "unbiased"}))
      ->capture_default_str();
  estimate_cmd->add_option("--g", g_spec, "identity, count or power:<p>")
      ->capture_default_str();
  estimate_cmd->add_option("--table", table_in, "use an exported i,j,pi_ij table");
  add_table_kind(estimate_cmd);
  AddOutput(estimate_cmd, io);

  // baseline
  std::string baseline_kind;
  auto* baseline_cmd = app.add_subcommand("baseline", "stability-based histogram baseline");
  baseline_cmd->add_option("kind", baseline_kind, "sbh or sampled-sbh")
      ->required()
      ->check(CLI::IsMember({"sbh", "sampled-sbh"}));
  AddInput(baseline_cmd, io, "full data as key<TAB>frequency TSV");
  AddPrivacy(baseline_cmd, privacy);
  AddScheme(baseline_cmd, scheme, "ppswor");
  add_seed(baseline_cmd);
  AddOutput(baseline_cmd, io);

  // analyze
  std::string analysis;
  std::string sweep_var = "delta";
  std::string grid_spec;
  std::string dist_spec;
  std::string methods_spec = "pws-keys,sbh,sampled-sbh";
  std::string conc_method = "pws";
  auto* analyze_cmd = app.add_subcommand("analyze", "exact comparison experiments");
  analyze_cmd->add_option("analysis", analysis, "sweep, nrmse or concordance")
      ->required()
      ->check(CLI::IsMember({"sweep", "nrmse", "concordance"}));
  AddPrivacy(analyze_cmd, privacy, false);
  AddScheme(analyze_cmd, scheme, "");
  analyze_cmd->add_option("--sweep", sweep_var, "delta, tau or frequency")
      ->check(CLI::IsMember({"delta", "tau", "frequency"}))
      ->capture_default_str();
  analyze_cmd->add_option("--grid", grid_spec, "comma-separated grid values");
  analyze_cmd->add_option("--dist", dist_spec,
                          "zipf:<n>,<alpha>,<w_max> | uniform:<n>,<lo>,<hi> | "
                          "file:<path>");
  analyze_cmd->add_option("--methods", methods_spec, "comma-separated methods")
      ->capture_default_str();
  analyze_cmd->add_option("--g", g_spec, "identity, count or power:<p>")
      ->capture_default_str();
  analyze_cmd->add_option("--max-freq", max_freq, "largest frequency (concordance)");
  analyze_cmd->add_option("--method", conc_method, "pws or sbh (concordance)")
      ->check(CLI::IsMember({"pws", "sbh"}))
      ->capture_default_str();
  add_table_kind(analyze_cmd);
  add_threads(analyze_cmd);
  AddOutput(analyze_cmd, io);

  // verify-dp
  std::string verify_format = "table";
  auto* verify_cmd = app.add_subcommand("verify-dp", "check an exported table for (eps, delta)-DP");
  AddInput(verify_cmd, io, "exported table (i,j,pi_ij) or pi CSV");
  AddPrivacy(verify_cmd, privacy);
  verify_cmd->add_option("--format", verify_format, "table or pi")
      ->check(CLI::IsMember({"table", "pi"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    std::cerr << "error: usage: " << msg << "\n";
    return 2;
  }

  try {
    if (*pi_cmd) {
      const auto rv = pws::ComputePi(MakeParams(privacy), MakeScheme(scheme),
                                     RequirePositive(max_freq, "--max-freq"));
      WithOutput(io.output, [&](std::ostream& out) {
        pws::WriteReportingVector(out, rv);
      });
    } else if (*pij_cmd) {
      const auto table =
          pws::ComputePij(MakeParams(privacy), MakeScheme(scheme),
                          RequirePositive(max_freq, "--max-freq"));
      WithOutput(io.output, [&](std::ostream& out) { pws::WriteTable(out, table); });
    } else if (*pdfs_cmd) {
      const auto seq = pws::ComputePdfs(
          MakeParams(privacy), MakeScheme(scheme),
          RequirePositive(max_freq, "--max-freq"),
          as_printed ? pws::AtomAccounting::kAsPrinted
                     : pws::AtomAccounting::kExact);
      WithOutput(io.output, [&](std::ostream& out) { pws::WritePdfs(out, seq.pdfs); });
      if (!atoms_out.empty()) {
        WithOutput(atoms_out, [&](std::ostream& out) { pws::WriteAtoms(out, seq.pdfs); });
      }
      if (!table_out.empty() || !tokens_out.empty()) {
        const auto table = pws::DiscretizePdfs(seq);
        if (!table_out.empty()) {
          WithOutput(table_out, [&](std::ostream& out) { pws::WriteTable(out, table); });
        }
        if (!tokens_out.empty()) {
          WithOutput(tokens_out, [&](std::ostream& out) {
            pws::WriteTokenIntervals(out, table);
          });
        }
      }
    } else if (*sample_cmd) {
      pws::KeyedHistogram data;
      if (!elements.empty()) {
        auto in = OpenInput(elements);
        data = pws::ReadElementStream(in);
      } else if (!io.input.empty()) {
        auto in = OpenInput(io.input);
        data = pws::ReadKeyFrequencies(in, io.input);
      } else {
        throw UsageError("one of --input or --elements is required");
      }
      const auto sample = pws::DrawSample(data, MakeScheme(scheme), seed);
      WithOutput(io.output, [&](std::ostream& out) {
        pws::WriteKeyFrequencies(out, sample.pairs);
      });
    } else if (*sanitize_cmd) {
      const auto params = MakeParams(privacy);
      const auto sch = MakeScheme(scheme);
      auto in = OpenInput(io.input);
      const auto data = pws::ReadKeyFrequencies(in, io.input);
      pws::WeightedSample sample{
          std::vector<pws::KeyFrequency>(data.entries().begin(),
                                         data.entries().end()),
          sch};
      Frequency m = max_freq;
      if (m == 0) m = std::max<Frequency>(1, data.ToCounts().max_frequency());
      if (mode == "keys") {
        const auto rv = pws::ComputePi(params, sch, m);
        const auto keys = pws::SanitizeKeys(sample, rv, seed);
        WithOutput(io.output, [&](std::ostream& out) { pws::WriteKeys(out, keys); });
      } else {
        std::optional<pws::SanitizerTable> table;
        if (!table_in.empty()) {
          auto tin = OpenInput(table_in);
          table = pws::ReadTable(tin, params, sch, table_in);
        } else {
          table = pws::BuildTable(ParseTableChoice(table_kind), params, sch, m);
        }
        const auto tokens = pws::SanitizeFrequencies(sample, *table, seed);
        WithOutput(io.output, [&](std::ostream& out) {
          pws::WriteKeyTokens(out, tokens);
        });
      }
    } else if (*estimate_cmd) {
      const auto params = MakeParams(privacy);
      const auto sch = MakeScheme(scheme);
      const auto g = ParseG(g_spec);
      const Frequency m = RequirePositive(max_freq, "--max-freq");
      std::optional<pws::SanitizerTable> table;
      if (!table_in.empty()) {
        auto tin = OpenInput(table_in);
        table = pws::ReadTable(tin, params, sch, table_in);
      } else {
        table = pws::BuildTable(ParseTableChoice(table_kind), params, sch, m);
      }
      const auto coeffs =
          estimator == "mle"
              ? pws::MleCoeffs(*table, pws::ComputePi(params, sch, table->max_frequency()), g)
              : pws::UnbiasedCoeffs(*table, g);
      auto in = OpenInput(io.input);
      const auto tokens = pws::ReadKeyTokens(in, io.input);
      std::map<std::string, double, std::less<>> weights;
      if (!weights_path.empty()) {
        auto win = OpenInput(weights_path);
        weights = pws::ReadKeyWeights(win, weights_path);
      }
      const double estimate = pws::EstimateStatistic(
          tokens, coeffs, [&](const std::string& key) {
            if (weights_path.empty()) return 1.0;
            const auto it = weights.find(key);
            return it == weights.end() ? 0.0 : it->second;
          });
      WithOutput(io.output, [&](std::ostream& out) {
        out << "estimate\n" << pws::FormatReal(estimate) << "\n";
      });
    } else if (*baseline_cmd) {
      const auto params = MakeParams(privacy);
      auto in = OpenInput(io.input);
      const auto data = pws::ReadKeyFrequencies(in, io.input);
      std::vector<pws::KeyValue<double>> released;
      if (baseline_kind == "sbh") {
        released = pws::SbhSanitize(data.entries(), params, seed);
      } else {
        released = pws::SampledSbhSanitize(data.entries(), params,
                                           MakeScheme(scheme), seed);
      }
      WithOutput(io.output, [&](std::ostream& out) {
        pws::WriteKeyReals(out, released);
      });
    } else if (*analyze_cmd) {
      const auto g = ParseG(g_spec);
      std::vector<pws::SweepRow> rows;
      if (analysis == "sweep") {
        pws::SweepConfig c;
        c.variable = sweep_var == "delta" ? pws::SweepVariable::kDelta
                     : sweep_var == "tau" ? pws::SweepVariable::kTau
                                          : pws::SweepVariable::kFrequency;
        PrivacyFlags pf = privacy;
        if (c.variable == pws::SweepVariable::kDelta) {
          if (pf.delta == 0.0) pf.delta = 1.0;
        } else if (pf.delta == 0.0) {
          throw UsageError("--delta is required for this sweep");
        }
        c.params = MakeParams(pf);
        if (scheme.scheme.empty()) {
          scheme.scheme = c.variable == pws::SweepVariable::kTau ? "ppswor" : "none";
        }
        if (c.variable == pws::SweepVariable::kTau && !scheme.tau) scheme.tau = 1.0;
        c.scheme = MakeScheme(scheme);
        if (!grid_spec.empty()) {
          c.grid = ParseGrid(grid_spec);
        } else if (c.variable == pws::SweepVariable::kDelta) {
          c.grid = pws::DefaultDeltaGrid();
        } else if (c.variable == pws::SweepVariable::kTau) {
          c.grid = pws::DefaultTauGrid();
        } else {
          throw UsageError("--grid is required for a frequency sweep");
        }
        if (c.variable != pws::SweepVariable::kFrequency) {
          c.population = ParseDistribution(
              dist_spec.empty() ? "zipf:100000,1,10000" : dist_spec);
        }
        try {
          for (const auto& name : SplitList(methods_spec, ',')) {
            c.methods.push_back(pws::ParseMethod(name));
          }
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
        c.g = g;
        c.table = ParseTableChoice(table_kind);
        c.threads = threads;
        rows = pws::RunSweep(c);
      } else if (analysis == "nrmse") {
        if (privacy.delta == 0.0) throw UsageError("--delta is required");
        pws::NrmseConfig c;
        c.params = MakeParams(privacy);
        if (scheme.scheme.empty()) scheme.scheme = "pps";
        if (scheme.scheme == "none") {
          throw UsageError("nrmse sweeps tau; use --scheme pps or ppswor");
        }
        if (!scheme.tau) scheme.tau = 1.0;
        c.scheme = MakeScheme(scheme);
        if (!grid_spec.empty()) c.tau_grid = ParseGrid(grid_spec);
        if (!dist_spec.empty()) c.selection = ParseDistribution(dist_spec);
        c.g = g;
        c.threads = threads;
        rows = pws::NrmseExperiment(c);
      } else {
        if (privacy.delta == 0.0) throw UsageError("--delta is required");
        const auto params = MakeParams(privacy);
        const Frequency m = RequirePositive(max_freq, "--max-freq");
        std::vector<pws::ConcordanceRow> out_rows;
        if (conc_method == "sbh") {
          for (Frequency a = 1; a <= m; ++a) {
            for (Frequency b = 1; b <= m; ++b) {
              if (a == b) continue;
              out_rows.push_back({a, b,
                                  pws::SbhConcordance(params, static_cast<double>(a),
                                                      static_cast<double>(b))});
            }
          }
        } else {
          if (scheme.scheme.empty()) scheme.scheme = "none";
          const auto table = pws::BuildTable(ParseTableChoice(table_kind),
                                             params, MakeScheme(scheme), m);
          for (Frequency a = 1; a <= m; ++a) {
            for (Frequency b = 1; b <= m; ++b) {
              if (a == b) continue;
              out_rows.push_back({a, b, pws::TableConcordance(table, a, b)});
            }
          }
        }
        WithOutput(io.output, [&](std::ostream& out) {
          pws::WriteConcordance(out, out_rows);
        });
        return 0;
      }
      WithOutput(io.output, [&](std::ostream& out) { pws::WriteSweep(out, rows); });
    } else if (*verify_cmd) {
      const auto params = MakeParams(privacy);
      auto in = OpenInput(io.input);
      std::vector<pws::DiscreteDistribution> rows;
      if (verify_format == "table") {
        rows = pws::ReadTableRows(in, io.input);
      } else {
        rows.emplace_back();
        pws::internal::ForEachRecord(
            in, ',', 4, pws::kPiHeader, io.input,
            [&](const auto& f, std::size_t line) {
              const double p = pws::internal::ParseReal(f[2], io.input, line);
              if (!(p >= 0.0 && p <= 1.0)) {
                throw DataError(pws::internal::Where(io.input, line) +
                                ": pi_i outside [0, 1]");
              }
              rows.emplace_back(std::vector<double>{1.0 - p, p});
            });
      }
      const auto report = pws::VerifyDp(rows, params);
      if (!report.passed) {
        std::cerr << "error: data: dp violation at frequency "
                  << report.worst_frequency << " ("
                  << (report.worst_is_upward ? "upward" : "downward")
                  << ") divergence " << pws::FormatReal(report.worst_divergence)
                  << " > delta " << pws::FormatReal(params.delta()) << "\n";
        return 1;
      }
      std::cout << "dp,pass,rows," << rows.size() - 1 << ",worst_divergence,"
                << pws::FormatReal(report.worst_divergence) << "\n";
    }
  } catch (const UsageError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: data: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
