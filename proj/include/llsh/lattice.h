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

#ifndef LLSH_LATTICE_H_
#define LLSH_LATTICE_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "llsh/random.h"

namespace llsh {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// Integer coefficient vector; the exact identity of a lattice point.
using Coeffs = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// A square, nonsingular basis; column i is the basis vector b_i.
class Basis {
 public:
  // Throws InvalidArgument for non-square or non-finite input and
  // DegenerateBasis when the pivoted-QR condition estimate exceeds 1e12.
  explicit Basis(Matrix columns);

  int dim() const { return static_cast<int>(columns_.cols()); }
  const Matrix& columns() const { return columns_; }

 private:
  Matrix columns_;
};

// Known lattices with fast exact decoders; kGeneral uses enumeration.
enum class Structure { kGeneral, kZk, kDk, kE8 };

// Gram-Schmidt data of a basis: mu(i, j) for j < i, and squared norms of the
// orthogonalized vectors.
struct GramSchmidt {
  Matrix mu;
  Vector bstar_sq;
};

GramSchmidt gram_schmidt(const Matrix& columns);

// Determinant-one lattice with its LLL-reduced basis and cached data used by
// the decoders. Immutable after construction; share through
// std::shared_ptr<const Lattice>.
class Lattice {
 public:
  int dim() const { return static_cast<int>(basis_.cols()); }
  // Normalized (|det| = 1) basis before reduction.
  const Matrix& basis() const { return basis_; }
  const Matrix& reduced() const { return reduced_; }
  const Matrix& gram() const { return gram_; }
  const Matrix& inv_reduced() const { return inv_reduced_; }
  const GramSchmidt& gso() const { return gso_; }
  Structure structure() const { return structure_; }
  // Factor applied to the canonical structured lattice (1 for kGeneral).
  double scale() const { return scale_; }
  const std::string& id() const { return id_; }

  Vector point(const Eigen::Ref<const Coeffs>& coeffs) const;

 private:
  friend std::shared_ptr<const Lattice> normalize_det(const Basis&, Structure,
                                                      std::string);
  Lattice() = default;

  Matrix basis_;
  Matrix reduced_;
  Matrix gram_;
  Matrix inv_reduced_;
  GramSchmidt gso_;
  Structure structure_ = Structure::kGeneral;
  double scale_ = 1.0;
  std::string id_;
};

using LatticePtr = std::shared_ptr<const Lattice>;

inline constexpr double kDefaultLllDelta = 0.99;

// Floating-point LLL. Throws ReductionFailure after 10^6 swaps.
Basis lll_reduce(const Basis& b, double delta = kDefaultLllDelta);

// LLL-reduces b (exactly, when b is integral), scales to |det| = 1 and
// caches Gram matrix, inverse and Gram-Schmidt data. Throws DegenerateBasis when |det| < 1e-30.
LatticePtr normalize_det(const Basis& b, Structure structure = Structure::kGeneral,
                         std::string id = "custom");

// |det| via Householder QR.
double abs_determinant(const Matrix& m);

// Canonical structured bases (before determinant normalization).
Matrix zk_basis(int k);
Matrix dk_basis(int k);  // k >= 2; columns e1+e2, e_i - e_{i-1}
Matrix e8_basis();       // D8 generators plus the all-halves glue vector

LatticePtr zk_lattice(int k);
LatticePtr dk_lattice(int k);
LatticePtr e8_lattice();

// B u with u uniform in [0, 1)^k, B the normalized basis.
Vector sample_fundamental(const Lattice& l, Stream& rng);

// Basis text format: line 1 holds k, the next k lines hold row i of the
// basis matrix (whitespace separated, %.17g). An optional trailing line
// "# normalize=0|1" records whether the basis is to be normalized on load.
struct BasisFile {
  Matrix columns;
  bool normalize = true;
};

BasisFile read_basis(std::istream& in);
void write_basis(std::ostream& out, const BasisFile& file);

}  // namespace llsh

#endif  // LLSH_LATTICE_H_
