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

// Threshold weighted sampling (ppswor / Poisson PPS), key-frequency
// histograms and element-stream aggregation.

#ifndef PWS_SAMPLING_HPP_
#define PWS_SAMPLING_HPP_

#include <cmath>
#include <cstdint>
#include <map>
#include <ranges>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pws/common.hpp"
#include "pws/random.hpp"

namespace pws {

// A non-negative function of frequency: identity, w^p, or a table of values
// for integer frequencies 1..size.
class FrequencyFunction {
 public:
  enum class Kind { kIdentity, kPower, kTabulated };

  static FrequencyFunction Identity() { return FrequencyFunction(); }

  static FrequencyFunction Power(double exponent) {
    if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
      throw std::invalid_argument("power exponent must be finite and >= 0");
    }
    FrequencyFunction f;
    if (exponent != 1.0) {
      f.kind_ = Kind::kPower;
      f.exponent_ = exponent;
    }
    return f;
  }

  // values[k] is f(k + 1).
  static FrequencyFunction Tabulated(std::vector<double> values) {
    for (double v : values) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("tabulated values must be finite and >= 0");
      }
    }
    FrequencyFunction f;
    f.kind_ = Kind::kTabulated;
    f.table_ = std::move(values);
    return f;
  }

  Kind kind() const { return kind_; }
  double exponent() const { return exponent_; }
  bool is_identity() const { return kind_ == Kind::kIdentity; }
  // Tabulated functions only accept integer arguments in 1..table size.
  bool accepts_real() const { return kind_ != Kind::kTabulated; }

  double operator()(double w) const {
    switch (kind_) {
      case Kind::kIdentity:
        return w;
      case Kind::kPower:
        return w <= 0.0 ? 0.0 : std::pow(w, exponent_);
      case Kind::kTabulated: {
        if (w == 0.0) return 0.0;
        const double r = std::round(w);
        if (r != w || r < 1.0 || r > static_cast<double>(table_.size())) {
          throw std::invalid_argument(
              "tabulated frequency function undefined at " + std::to_string(w));
        }
        return table_[static_cast<std::size_t>(r) - 1];
      }
    }
    return 0.0;
  }

  std::string Describe() const {
    switch (kind_) {
      case Kind::kIdentity:
        return "identity";
      case Kind::kPower:
        return "power(" + std::to_string(exponent_) + ")";
      case Kind::kTabulated:
        return "tabulated(" + std::to_string(table_.size()) + ")";
    }
    return "";
  }

  bool operator==(const FrequencyFunction&) const = default;

 private:
  FrequencyFunction() = default;

  Kind kind_ = Kind::kIdentity;
  double exponent_ = 1.0;
  std::vector<double> table_;
};

enum class SchemeKind { kNone, kPpswor, kPps };

// Threshold sampling scheme (D, f, τ): a key of frequency w is included iff
// u < f(w)·τ with u ~ Exp(1) (ppswor) or u ~ U[0,1] (PPS). kNone keeps every
// key.
class SamplingScheme {
 public:
  static SamplingScheme None() { return SamplingScheme(); }

  static SamplingScheme Ppswor(double tau,
                               FrequencyFunction f = FrequencyFunction::Identity()) {
    return SamplingScheme(SchemeKind::kPpswor, tau, std::move(f));
  }

  static SamplingScheme Pps(double tau,
                            FrequencyFunction f = FrequencyFunction::Identity()) {
    return SamplingScheme(SchemeKind::kPps, tau, std::move(f));
  }

  SchemeKind kind() const { return kind_; }
  double tau() const { return tau_; }
  const FrequencyFunction& weight() const { return weight_; }

  // q_i. q_0 = 0 by convention.
  double InclusionProb(Frequency i) const {
    if (i <= 0) return 0.0;
    return InclusionProbReal(static_cast<double>(i));
  }

  // The same law for real-valued (e.g. noisy) frequencies.
  double InclusionProbReal(double w) const {
    if (w <= 0.0) return 0.0;
    switch (kind_) {
      case SchemeKind::kNone:
        return 1.0;
      case SchemeKind::kPpswor:
        return -std::expm1(-weight_(w) * tau_);
      case SchemeKind::kPps:
        return std::min(1.0, weight_(w) * tau_);
    }
    return 0.0;
  }

  // Draws u_x from the key's stream and applies the threshold test.
  bool Includes(double w, KeyStream& stream) const {
    if (w <= 0.0) return false;
    switch (kind_) {
      case SchemeKind::kNone:
        return true;
      case SchemeKind::kPpswor:
        return stream.Exponential() < weight_(w) * tau_;
      case SchemeKind::kPps:
        return stream.Uniform() < weight_(w) * tau_;
    }
    return false;
  }

  std::string Describe() const {
    switch (kind_) {
      case SchemeKind::kNone:
        return "none";
      case SchemeKind::kPpswor:
        return "ppswor(tau=" + std::to_string(tau_) + ", f=" +
               weight_.Describe() + ")";
      case SchemeKind::kPps:
        return "pps(tau=" + std::to_string(tau_) + ", f=" +
               weight_.Describe() + ")";
    }
    return "";
  }

  bool operator==(const SamplingScheme&) const = default;

 private:
  SamplingScheme() = default;
  SamplingScheme(SchemeKind kind, double tau, FrequencyFunction f)
      : kind_(kind), tau_(tau), weight_(std::move(f)) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
      throw std::invalid_argument("tau must be finite and >= 0");
    }
    if (weight_.kind() == FrequencyFunction::Kind::kPower &&
        weight_.exponent() > 2.0) {
      throw std::invalid_argument("sampling weight w^p needs p in [0, 2]");
    }
  }

  SchemeKind kind_ = SchemeKind::kNone;
  double tau_ = 0.0;
  FrequencyFunction weight_ = FrequencyFunction::Identity();
};

template <typename Weight>
struct KeyValue {
  std::string key;
  Weight value;

  bool operator==(const KeyValue&) const = default;
};

using KeyFrequency = KeyValue<Frequency>;

// Count form: frequency → number of distinct keys with that frequency.
class FrequencyHistogram {
 public:
  void Add(Frequency frequency, std::int64_t count = 1) {
    if (frequency < 1) {
      throw std::invalid_argument("histogram frequencies must be >= 1");
    }
    if (count < 0) throw std::invalid_argument("negative key count");
    if (count == 0) return;
    counts_[frequency] += count;
  }

  const std::map<Frequency, std::int64_t>& counts() const { return counts_; }
  bool empty() const { return counts_.empty(); }
  std::size_t distinct_frequencies() const { return counts_.size(); }
  Frequency max_frequency() const {
    return counts_.empty() ? 0 : counts_.rbegin()->first;
  }

  std::int64_t total_keys() const {
    std::int64_t n = 0;
    for (const auto& [f, c] : counts_) n += c;
    return n;
  }

  double total_mass() const {
    double m = 0.0;
    for (const auto& [f, c] : counts_) m += static_cast<double>(f) * c;
    return m;
  }

 private:
  std::map<Frequency, std::int64_t> counts_;
};

// Keyed form; entries keep first-insertion order so outputs are stable.
class KeyedHistogram {
 public:
  KeyedHistogram() = default;

  void Add(std::string key, Frequency frequency) {
    if (frequency < 1) {
      throw std::invalid_argument("key '" + key + "' has frequency < 1");
    }
    auto [it, inserted] = index_.emplace(key, entries_.size());
    if (!inserted) throw DataError("duplicate key '" + key + "'");
    entries_.push_back({std::move(key), frequency});
  }

  // Adds `count` occurrences to a key, creating it if needed.
  void Accumulate(std::string_view key, Frequency count = 1) {
    auto it = index_.find(std::string(key));
    if (it == index_.end()) {
      Add(std::string(key), count);
    } else {
      entries_[it->second].value += count;
    }
  }

  // Sums counts key-wise; used to combine independently aggregated streams.
  void Merge(const KeyedHistogram& other) {
    for (const auto& e : other.entries_) Accumulate(e.key, e.value);
  }

  std::span<const KeyFrequency> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  FrequencyHistogram ToCounts() const {
    FrequencyHistogram h;
    for (const auto& e : entries_) h.Add(e.value);
    return h;
  }

 private:
  std::vector<KeyFrequency> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct WeightedSample {
  std::vector<KeyFrequency> pairs;
  SamplingScheme scheme = SamplingScheme::None();
};

// Independent per-key threshold sampling with per-key deterministic draws.
// Works for integer or real-valued weights.
template <typename Weight>
std::vector<KeyValue<Weight>> ThresholdSample(
    std::span<const KeyValue<Weight>> data, const SamplingScheme& scheme,
    std::uint64_t seed) {
  std::vector<KeyValue<Weight>> out;
  for (const auto& entry : data) {
    KeyStream stream(seed, entry.key, StreamPurpose::kSampling);
    if (scheme.Includes(static_cast<double>(entry.value), stream)) {
      out.push_back(entry);
    }
  }
  return out;
}

inline WeightedSample DrawSample(const KeyedHistogram& data,
                                 const SamplingScheme& scheme,
                                 std::uint64_t seed) {
  return {ThresholdSample(data.entries(), scheme, seed), scheme};
}

// Single pass over a stream of keys; w_x is the number of occurrences of x.
template <std::ranges::input_range Keys>
KeyedHistogram AggregateElements(Keys&& keys) {
  KeyedHistogram h;
  for (const auto& key : keys) h.Accumulate(std::string_view(key));
  return h;
}

}  // namespace pws

#endif  // PWS_SAMPLING_HPP_
