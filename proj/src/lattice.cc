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

#include "llsh/lattice.h"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "llsh/errors.h"

namespace llsh {
namespace {

constexpr long kMaxSwaps = 1'000'000;
// Size-reduction coefficients above this trigger a full re-orthogonalization.
constexpr double kOrthogonalityLoss = 1e6;

double log_abs_det(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  const auto& r = qr.matrixQR();
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.rows(); ++i) s += std::log(std::abs(r(i, i)));
  return s;
}

}  // namespace

Basis::Basis(Matrix columns) : columns_(std::move(columns)) {
  if (columns_.rows() != columns_.cols() || columns_.cols() == 0)
    throw InvalidArgument("basis must be a non-empty square matrix");
  if (!columns_.allFinite()) throw InvalidArgument("basis has non-finite entries");
  for (Eigen::Index i = 0; i < columns_.cols(); ++i)
    if (columns_.col(i).norm() == 0.0) throw DegenerateBasis("basis has a zero column");
  // Rank-revealing QR: the last pivot against the first estimates the
  // reciprocal condition number.
  const Eigen::ColPivHouseholderQR<Matrix> qr(columns_);
  const auto n = columns_.cols();
  const double first = std::abs(qr.matrixR()(0, 0));
  const double last = std::abs(qr.matrixR()(n - 1, n - 1));
  if (!(last > 1e-12 * first))
    throw DegenerateBasis("basis columns are (numerically) linearly dependent");
}

GramSchmidt gram_schmidt(const Matrix& b) {
  const Eigen::Index n = b.cols();
  GramSchmidt g;
  g.mu = Matrix::Identity(n, n);
  g.bstar_sq = Vector::Zero(n);
  Matrix bstar = b;
  for (Eigen::Index i = 0; i < n; ++i) {
    // Modified Gram-Schmidt against the already orthogonalized vectors.
    for (Eigen::Index j = 0; j < i; ++j) {
      const double m = b.col(i).dot(bstar.col(j)) / g.bstar_sq(j);
      g.mu(i, j) = m;
      bstar.col(i) -= m * bstar.col(j);
    }
    g.bstar_sq(i) = bstar.col(i).squaredNorm();
  }
  return g;
}

Basis lll_reduce(const Basis& basis, double delta) {
  if (!(delta > 0.25 && delta < 1.0))
    throw InvalidArgument("LLL delta must lie in (0.25, 1)");
  Matrix b = basis.columns();
  const Eigen::Index n = b.cols();
  Matrix bstar = Matrix::Zero(b.rows(), n);
  Matrix mu = Matrix::Identity(n, n);
  Vector bsq = Vector::Zero(n);

  // Recomputes row i of the Gram-Schmidt data from the current b_i and the
  // (valid) orthogonal vectors 0..i-1.
  auto orthogonalize = [&](Eigen::Index i) {
    bstar.col(i) = b.col(i);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double m = b.col(i).dot(bstar.col(j)) / bsq(j);
      mu(i, j) = m;
      bstar.col(i) -= m * bstar.col(j);
    }
    bsq(i) = bstar.col(i).squaredNorm();
  };

  orthogonalize(0);
  Eigen::Index k = 1;
  long swaps = 0;
  while (k < n) {
    orthogonalize(k);
    // Size reduction; repeated while float error leaves |mu| above 1/2.
    for (int pass = 0; pass < 8; ++pass) {
      bool changed = false;
      double largest = 0.0;
      for (Eigen::Index j = k - 1; j >= 0; --j) {
        const double q = std::nearbyint(mu(k, j));
        if (q == 0.0) continue;
        largest = std::max(largest, std::abs(q));
        b.col(k) -= q * b.col(j);
        for (Eigen::Index i = 0; i < j; ++i) mu(k, i) -= q * mu(j, i);
        mu(k, j) -= q;
        changed = true;
      }
      if (!changed) break;
      orthogonalize(k);
      if (largest < kOrthogonalityLoss) {
        bool ok = true;
        for (Eigen::Index j = 0; j < k; ++j)
          if (std::abs(mu(k, j)) > 0.5 + 1e-9) ok = false;
        if (ok) break;
      }
    }
    if (bsq(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * bsq(k - 1)) {
      ++k;
    } else {
      b.col(k).swap(b.col(k - 1));
      if (++swaps > kMaxSwaps)
        throw ReductionFailure("LLL exceeded 10^6 swaps without converging");
      if (k > 1) {
        --k;
      } else {
        orthogonalize(0);
      }
    }
  }
  return Basis(std::move(b));
}

double abs_determinant(const Matrix& m) { return std::exp(log_abs_det(m)); }

LatticePtr normalize_det(const Basis& b, Structure structure, std::string id) {
  const int k = b.dim();
  const double ld = log_abs_det(b.columns());
  if (!(ld > std::log(1e-30)))
    throw DegenerateBasis("basis determinant below 1e-30");
  const double s = std::exp(-ld / k);

  auto l = std::shared_ptr<Lattice>(new Lattice());
  l->basis_ = b.columns() * s;
  l->reduced_ = lll_reduce(b).columns() * s;
  l->gram_ = l->reduced_.transpose() * l->reduced_;
  l->inv_reduced_ = l->reduced_.inverse();
  l->gso_ = gram_schmidt(l->reduced_);
  l->structure_ = structure;
  l->scale_ = s;
  l->id_ = std::move(id);
  return l;
}

Vector Lattice::point(
    const Eigen::Ref<const Coeffs>& coeffs) const {
  return reduced_ * coeffs.cast<double>();
}

Matrix zk_basis(int k) {
  if (k < 1) throw InvalidArgument("dimension must be >= 1");
  return Matrix::Identity(k, k);
}

Matrix dk_basis(int k) {
  if (k < 2) throw InvalidArgument("D_k needs k >= 2");
  Matrix b = Matrix::Zero(k, k);
  b(0, 0) = 1.0;
  b(1, 0) = 1.0;
  for (int i = 1; i < k; ++i) {
    b(i, i) = 1.0;
    b(i - 1, i) = -1.0;
  }
  return b;
}

Matrix e8_basis() {
  Matrix b = Matrix::Zero(8, 8);
  b(0, 0) = 2.0;
  for (int i = 1; i < 7; ++i) {
    b(i - 1, i) = -1.0;
    b(i, i) = 1.0;
  }
  b.col(7).setConstant(0.5);
  return b;
}

LatticePtr zk_lattice(int k) {
  return normalize_det(Basis(zk_basis(k)), Structure::kZk, "zk");
}

LatticePtr dk_lattice(int k) {
  return normalize_det(Basis(dk_basis(k)), Structure::kDk, "dk");
}

LatticePtr e8_lattice() {
  return normalize_det(Basis(e8_basis()), Structure::kE8, "e8");
}

Vector sample_fundamental(const Lattice& l, Stream& rng) {
  Vector u(l.dim());
  for (int i = 0; i < l.dim(); ++i) u(i) = rng.uniform();
  return l.basis() * u;
}

BasisFile read_basis(std::istream& in) {
  BasisFile f;
  std::string line;
  std::vector<std::string> rows;
  int k = -1;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line[line.find_first_not_of(" \t")] == '#') {
      const auto pos = line.find("normalize=");
      if (pos != std::string::npos)
        f.normalize = line.substr(pos + 10, 1) != "0";
      continue;
    }
    if (k < 0) {
      std::istringstream ss(line);
      if (!(ss >> k) || k < 1) throw InvalidArgument("basis file: bad dimension line");
      continue;
    }
    rows.push_back(line);
  }
  if (k < 0) throw InvalidArgument("basis file: empty");
  if (static_cast<int>(rows.size()) != k)
    throw InvalidArgument("basis file: expected " + std::to_string(k) + " rows");
  f.columns.resize(k, k);
  for (int i = 0; i < k; ++i) {
    std::istringstream ss(rows[i]);
    for (int j = 0; j < k; ++j) {
      std::string tok;
      if (!(ss >> tok)) throw InvalidArgument("basis file: short row " + std::to_string(i + 1));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw InvalidArgument("basis file: bad number '" + tok + "'");
      }
      if (used != tok.size()) throw InvalidArgument("basis file: bad number '" + tok + "'");
      f.columns(i, j) = v;
    }
    std::string extra;
    if (ss >> extra) throw InvalidArgument("basis file: long row " + std::to_string(i + 1));
  }
  return f;
}

void write_basis(std::ostream& out, const BasisFile& f) {
  const auto k = f.columns.cols();
  out << k << '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", f.columns(i, j));
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  }
  out << "# normalize=" << (f.normalize ? 1 : 0) << '\n';
}

}  // namespace llsh
