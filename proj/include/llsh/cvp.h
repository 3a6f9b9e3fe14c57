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

#ifndef LLSH_CVP_H_
#define LLSH_CVP_H_

#include <cstdint>
#include <string>

#include "llsh/errors.h"
#include "llsh/lattice.h"

namespace llsh {

// Closest lattice vector to a target. `coeffs` is the exact identity of the
// point (in the reduced basis for Lattice decoders, in the canonical basis for
// the free structured decoders); `vector` is its coordinates.
struct CvpResult {
  Coeffs coeffs;
  Vector vector;
  double dist = 0.0;
};

// Enumeration node budget ran out; carries the best point found so far.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, CvpResult best)
      : Error(what), best_(std::move(best)) {}
  const CvpResult& best() const { return best_; }

 private:
  CvpResult best_;
};

inline constexpr std::uint64_t kDefaultNodeBudget = 1'000'000'000ULL;
// Enumeration keeps its per-level state on the stack.
inline constexpr int kMaxEnumDim = 64;

// Nearest point of Z^k; ties at .5 go to the even integer.
CvpResult decode_zk(const Vector& target);
// Nearest point of the checkerboard lattice D_k (k >= 2); coefficients in
// dk_basis(k).
CvpResult decode_dk(const Vector& target);
// Nearest point of E8 = D8 u (D8 + 1/2); coefficients in e8_basis().
CvpResult decode_e8(const Vector& target);

// Babai nearest-plane point on the reduced basis.
CvpResult babai(const Lattice& l, const Vector& target);

// Exact Schnorr-Euchner enumeration, radius seeded with the Babai distance.
// Ties are broken toward the lexicographically smallest coefficient vector.
CvpResult decode_enum(const Lattice& l, const Vector& target,
                      std::uint64_t node_budget = kDefaultNodeBudget);

// Whether the target lies in the Voronoi cell of the origin under the same
// tie rule as decode_enum. Throws BudgetExceeded past the node budget.
bool in_voronoi_enum(const Lattice& l, const Vector& target,
                     std::uint64_t node_budget = kDefaultNodeBudget);

// Exhaustive search over coefficient vectors within `box` of the Babai point
// (test oracle). Requires box^k <= 10^8.
CvpResult decode_brute(const Lattice& l, const Vector& target, int box);

// Number of nonzero lattice points with norm strictly below `radius`.
std::uint64_t enumerate_ball_count(const Lattice& l, double radius,
                                   std::uint64_t node_budget = kDefaultNodeBudget);

enum class DecoderKind { kAuto, kZk, kDk, kE8, kEnum };

std::string to_string(DecoderKind kind);

// CVP strategy bound to a lattice. kAuto uses the structured decoder when
// the lattice carries a structure tag and enumeration otherwise. Safe to use
// concurrently from many threads.
class Decoder {
 public:
  explicit Decoder(LatticePtr lattice, DecoderKind kind = DecoderKind::kAuto,
                   std::uint64_t node_budget = kDefaultNodeBudget);

  CvpResult decode(const Vector& target) const;
  // True when the target decodes to the origin, i.e. lies in the Voronoi
  // cell. Enumeration lattices answer this with an early-exit search of
  // radius |target| instead of a full decode.
  bool in_cell(const Vector& target) const;
  const Lattice& lattice() const { return *lattice_; }
  const LatticePtr& lattice_ptr() const { return lattice_; }
  DecoderKind kind() const { return kind_; }

 private:
  LatticePtr lattice_;
  DecoderKind kind_;
  std::uint64_t node_budget_;
};

}  // namespace llsh

#endif  // LLSH_CVP_H_
