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

#ifndef LLSH_RANDLAT_H_
#define LLSH_RANDLAT_H_

#include <cstdint>
#include <vector>

#include "llsh/cvp.h"
#include "llsh/lattice.h"
#include "llsh/random.h"
#include "llsh/stats.h"

namespace llsh {

// Smallest prime >= 2^20.
inline constexpr std::uint64_t kDefaultModulus = 1048583;

struct GmParams {
  int k = 8;
  std::uint64_t p = kDefaultModulus;
  std::uint64_t seed = 1;
};

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(std::uint64_t n);
std::uint64_t next_prime(std::uint64_t n);

// Integer Goldstein-Mayer basis: columns p e_1 and e_i + a_i e_1 (i >= 2)
// with a_i uniform in {0, ..., p - 1}. Determinant p.
Matrix gm_basis(int k, std::uint64_t p, Stream& rng);

// Random determinant-one lattice from the Goldstein-Mayer q-ary ensemble.
// Requires p prime and p >= 2^16.
LatticePtr sample_gm(const GmParams& params, Stream& rng);
// Lattice number `index` of the ensemble stream for params.seed.
LatticePtr sample_gm(const GmParams& params, std::uint64_t index);

// Nonzero lattice points of norm < radius. Requires the ball volume to be
// at most 10^6.
std::uint64_t count_points(const Lattice& l, double radius);

struct Ball {
  Vector center;
  double radius = 0.0;
};

// A ball or a union of two balls. Must not contain the origin.
struct Region {
  std::vector<Ball> balls;

  int dim() const;
  double volume() const;
  bool contains_origin() const;
  // True when some lattice point lies in the (open) region.
  bool hit_by(const Lattice& l) const;
};

// Fraction of ensemble lattices (index 0..trials-1) with no point in the
// region, with a Wilson 95% interval.
Estimate empty_probability(const GmParams& params, const Region& region,
                           std::uint64_t trials, int workers = 1);

// Per-lattice point counts in the centered ball of the given volume, over
// ensemble lattices 0..lattices-1.
std::vector<double> siegel_counts(const GmParams& params, double volume,
                                  std::uint64_t lattices, int workers = 1);

// Fraction of uniform Voronoi samples x with V_x = V_B |x|^k > k/8.
double rogers_tail_fraction(const Decoder& dec, std::uint64_t samples,
                            std::uint64_t seed);

}  // namespace llsh

#endif  // LLSH_RANDLAT_H_
