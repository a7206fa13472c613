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

#ifndef PWS_RANDOM_HPP_
#define PWS_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <string_view>

namespace pws {

// Separates the independent random draws made for one key.
enum class StreamPurpose : std::uint64_t {
  kSampling = 1,
  kKeySanitizer = 2,
  kFrequencySanitizer = 3,
  kLaplaceNoise = 4,
};

// 64-bit FNV-1a; stable across platforms, unlike std::hash.
inline std::uint64_t KeyHash(std::string_view key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream keyed on (seed, key, purpose). Draws for a key do not
// depend on which other keys exist or on processing order.
class KeyStream {
 public:
  KeyStream(std::uint64_t seed, std::string_view key, StreamPurpose purpose)
      : base_(SplitMix64(seed ^ SplitMix64(KeyHash(key) ^
                                           (static_cast<std::uint64_t>(
                                                purpose) *
                                            0xd1b54a32d192ed03ULL)))) {}

  std::uint64_t NextBits() {
    return SplitMix64(base_ + 0x632be59bd9b4e019ULL * ++counter_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(NextBits() >> 11) * 0x1.0p-53; }

  // Exp(1) via inverse CDF.
  double Exponential() { return -std::log1p(-Uniform()); }

  // Laplace(0, scale) via inverse CDF.
  double Laplace(double scale) {
    double v = Uniform();
    while (v == 0.0) v = Uniform();
    const double u = v - 0.5;
    const double mag = -scale * std::log1p(-2.0 * std::abs(u));
    return u < 0 ? -mag : mag;
  }

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace pws

#endif  // PWS_RANDOM_HPP_
