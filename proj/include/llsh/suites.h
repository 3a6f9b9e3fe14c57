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

#ifndef LLSH_SUITES_H_
#define LLSH_SUITES_H_

#include <cstdint>
#include <string>
#include <vector>

#include "llsh/errors.h"
#include "llsh/report.h"

namespace llsh::suites {

// Zero-valued fields select each suite's own default.
struct SuiteOptions {
  int k = 0;
  std::uint64_t seed = 1;
  int workers = 1;
  std::uint64_t lattices = 0;
  std::uint64_t trials = 0;
  std::uint64_t p = 0;
  double c = 0.0;
  double delta = 0.0;
  double envelope = 0.0;
};

struct SuiteResult {
  std::string name;
  bool pass = false;
  report::Json report;
};

class UnknownSuite : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// siegel, schmidt, rogers, sandwich, schmidt-ap, exponents.
const std::vector<std::string>& names();

// Runs one suite. Throws UnknownSuite for names outside names().
//
//   siegel      k=8, 2000 lattices with modulus 4294967311, centred balls of
//               volume 0.5, 1, 2, 4; mean point count within 3 standard
//               errors of the volume.
//   schmidt     k=12, 2000 lattices, balls of volume 0.5, 1, 2 centred at
//               twice their radius; empty fraction within 0.02 + CI of e^-V.
//   rogers      k=12, 50 lattices x 1e5 samples; mean fraction of Voronoi
//               samples with V_x > k/8 at most 4 e^{-k/8}.
//   sandwich    k=16, delta = k^(1/4), 200 lattices x 1e4 trials, plus the
//               Jensen check at gamma 1, 2.25, 4 on the same estimates.
//   schmidt-ap  k=13, 50 pairs, 2000 lattices.
//   exponents   k=64, c=2, envelope 10.
SuiteResult run(const std::string& name, const SuiteOptions& opt);

}  // namespace llsh::suites

#endif  // LLSH_SUITES_H_
