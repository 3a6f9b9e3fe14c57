// Copyright 2026 The llsh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LLSH_RANDOM_H_
#define LLSH_RANDOM_H_

#include <cstdint>
#include <limits>

namespace llsh {

// Deterministic pseudo-random stream (xoshiro256** seeded through SplitMix64).
//
// Every Monte Carlo estimator in the library draws trial i from
// Stream(seed, i), so results depend only on (seed, trial index) and never on
// how trials are spread across worker threads. Uniform and Gaussian variates
// are produced by documented transforms (53-bit mantissa fill, Box-Muller) so
// outputs are identical across standard libraries.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed, std::uint64_t index = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return next(); }

  std::uint64_t next();
  // Uniform on [0, 1).
  double uniform();
  // Uniform integer in [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n);
  // Standard normal via the Box-Muller transform; the second variate of each
  // pair is cached.
  double normal();

  // Independent child stream, e.g. for per-table hash draws.
  Stream split(std::uint64_t index) const;

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace llsh

#endif  // LLSH_RANDOM_H_
