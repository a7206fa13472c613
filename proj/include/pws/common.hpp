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

#ifndef PWS_COMMON_HPP_
#define PWS_COMMON_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace pws {

// Additive slack used whenever a probability is compared against δ or 1.
inline constexpr double kProbabilitySlack = 1e-12;

// Raised for problems with input data (as opposed to caller precondition
// violations, which raise std::invalid_argument).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Frequency = std::int64_t;

// Pairwise (cascade) summation. The reduction tree depends only on the
// length of the input, so results are reproducible.
inline double PairwiseSum(std::span<const double> values) {
  if (values.size() <= 8) {
    double total = 0.0;
    for (double v : values) total += v;
    return total;
  }
  const std::size_t half = values.size() / 2;
  return PairwiseSum(values.first(half)) + PairwiseSum(values.subspan(half));
}

// Evaluates fn(0..n-1) on up to `threads` workers and returns the results
// in index order.
template <typename Fn>
auto ParallelMap(std::size_t n, std::size_t threads, Fn fn)
    -> std::vector<decltype(fn(std::size_t{0}))> {
  using Result = decltype(fn(std::size_t{0}));
  std::vector<Result> out(n);
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    for (std::size_t k = 0; k < n; ++k) out[k] = fn(k);
    return out;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(threads);
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      try {
        for (std::size_t k = t; k < n; k += threads) out[k] = fn(k);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace pws

#endif  // PWS_COMMON_HPP_
