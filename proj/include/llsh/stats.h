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

#ifndef LLSH_STATS_H_
#define LLSH_STATS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace llsh {

// Two-sided 95% normal quantile.
inline constexpr double kZ95 = 1.959963984540054;

// Binomial proportion with a Wilson 95% interval.
struct Estimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  // Half-width of the Wilson interval.
  double ci_half = 0.0;
  std::uint64_t failures = 0;
};

Estimate wilson(std::uint64_t successes, std::uint64_t trials);

struct MeanStat {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  double stderr_ = 0.0;
  std::size_t n = 0;
};

MeanStat mean_stat(std::span<const double> xs);

// Runs body(begin, end, worker) over [0, n) split into contiguous blocks on
// `workers` threads. The body is responsible for writing into per-index or
// per-block slots; the split never affects which random substream a trial
// index uses.
void parallel_blocks(std::size_t n, int workers,
                     const std::function<void(std::size_t, std::size_t)>& body);

// Sum of per-trial indicator results, computed in parallel.
std::uint64_t parallel_count(
    std::size_t n, int workers,
    const std::function<std::uint64_t(std::size_t, std::size_t)>& block_count);

}  // namespace llsh

#endif  // LLSH_STATS_H_
