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

#include "llsh/cvp.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace llsh {
namespace {

constexpr double kTieTol = 1e-12;

bool lex_less(const std::int64_t* a, const std::int64_t* b, int n) {
  for (int i = 0; i < n; ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

bool lex_less(const Coeffs& a, const Coeffs& b) {
  return lex_less(a.data(), b.data(), static_cast<int>(a.size()));
}

// Nearest D_k point in integer coordinates.
Coeffs round_dk(const Vector& t) {
  const auto n = t.size();
  Coeffs f(n);
  Eigen::Index worst = 0;
  double worst_err = -1.0;
  std::int64_t sum = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    f(i) = static_cast<std::int64_t>(std::nearbyint(t(i)));
    sum += f(i);
    const double err = std::abs(t(i) - static_cast<double>(f(i)));
    if (err > worst_err) {
      worst_err = err;
      worst = i;
    }
  }
  if (sum % 2 != 0) f(worst) += t(worst) >= static_cast<double>(f(worst)) ? 1 : -1;
  return f;
}

Coeffs solve_integral(const Matrix& inverse, const Vector& v) {
  const Vector z = inverse * v;
  Coeffs c(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i)
    c(i) = static_cast<std::int64_t>(std::nearbyint(z(i)));
  return c;
}

const Matrix& dk_inverse(int k) {
  thread_local int cached_k = -1;
  thread_local Matrix inv;
  if (cached_k != k) {
    inv = dk_basis(k).inverse();
    cached_k = k;
  }
  return inv;
}

const Matrix& e8_inverse() {
  static const Matrix inv = e8_basis().inverse();
  return inv;
}

// Schnorr-Euchner depth-first enumeration over the reduced basis. `w` holds
// the target in reduced-basis coordinates; leaf(z, d2) is called for every
// coefficient vector whose squared distance d2 is within the (possibly
// shrinking) bound r2, and stops the search by returning true.
//
// Centers are kept as partial sums sums[i][j] = w_i + sum_{t >= j}
// mu(t, i) (w_t - z_t). top[i] is the highest level whose coefficient
// changed since row i was last brought up to date.
template <typename Leaf>
void enumerate(const Lattice& l, const double* w, double& r2,
               std::uint64_t budget, Leaf&& leaf) {
  const int n = l.dim();
  const Matrix& mu = l.gso().mu;
  const Vector& bsq = l.gso().bstar_sq;
  std::array<double, kMaxEnumDim> c;
  std::array<double, kMaxEnumDim + 1> partial;
  std::array<std::int64_t, kMaxEnumDim> z, dx, ddx;
  std::array<int, kMaxEnumDim> top;
  std::vector<double> sums(static_cast<std::size_t>(n) * (n + 1));
  auto sum = [&](int i, int j) -> double& { return sums[static_cast<std::size_t>(i) * (n + 1) + j]; };
  for (int i = 0; i < n; ++i) {
    sum(i, n) = w[i];
    top[i] = n - 1;
  }

  auto mark = [&](int i) {
    if (i > 0) top[i - 1] = std::max(top[i - 1], i);
  };
  auto start_level = [&](int i) {
    for (int j = top[i]; j > i; --j)
      sum(i, j) = sum(i, j + 1) + mu(j, i) * (w[j] - static_cast<double>(z[j]));
    if (i > 0) top[i - 1] = std::max(top[i - 1], top[i]);
    top[i] = i;
    const double ci = sum(i, i + 1);
    c[i] = ci;
    const double r = std::nearbyint(ci);
    z[i] = static_cast<std::int64_t>(r);
    dx[i] = ddx[i] = ci >= r ? 1 : -1;
    mark(i);
  };

  std::uint64_t nodes = 0;
  partial[n] = 0.0;
  int i = n - 1;
  start_level(i);
  for (;;) {
    const double diff = c[i] - static_cast<double>(z[i]);
    const double d = partial[i + 1] + bsq(i) * diff * diff;
    if (++nodes > budget) throw std::length_error("enumeration node budget exceeded");
    if (d <= r2 * (1.0 + 1e-10) + 1e-300) {
      if (i == 0) {
        if (leaf(z.data(), d)) return;
      } else {
        partial[i] = d;
        --i;
        start_level(i);
        continue;
      }
    } else {
      if (++i == n) break;
    }
    z[i] += dx[i];
    ddx[i] = -ddx[i];
    dx[i] = ddx[i] - dx[i];
    mark(i);
  }
}

void check_target(const Lattice& l, const Vector& target) {
  if (target.size() != l.dim())
    throw InvalidArgument("target dimension does not match the lattice");
  if (l.dim() > kMaxEnumDim)
    throw InvalidArgument("enumeration supports k <= " + std::to_string(kMaxEnumDim));
}

CvpResult finish(const Lattice& l, const Vector& target, Coeffs coeffs) {
  CvpResult r;
  r.vector = l.reduced() * coeffs.cast<double>();
  r.dist = (target - r.vector).norm();
  r.coeffs = std::move(coeffs);
  return r;
}

}  // namespace

CvpResult decode_zk(const Vector& target) {
  CvpResult r;
  r.coeffs.resize(target.size());
  for (Eigen::Index i = 0; i < target.size(); ++i)
    r.coeffs(i) = static_cast<std::int64_t>(std::nearbyint(target(i)));
  r.vector = r.coeffs.cast<double>();
  r.dist = (target - r.vector).norm();
  return r;
}

CvpResult decode_dk(const Vector& target) {
  if (target.size() < 2) throw InvalidArgument("D_k decoding needs k >= 2");
  CvpResult r;
  const Coeffs f = round_dk(target);
  r.vector = f.cast<double>();
  r.dist = (target - r.vector).norm();
  r.coeffs = solve_integral(dk_inverse(static_cast<int>(target.size())), r.vector);
  return r;
}

CvpResult decode_e8(const Vector& target) {
  if (target.size() != 8) throw InvalidArgument("E8 decoding needs k = 8");
  const Vector half = Vector::Constant(8, 0.5);
  const Vector v0 = round_dk(target).cast<double>();
  const Vector v1 = round_dk(target - half).cast<double>() + half;
  const double d0 = (target - v0).squaredNorm();
  const double d1 = (target - v1).squaredNorm();
  CvpResult a{solve_integral(e8_inverse(), v0), v0, std::sqrt(d0)};
  CvpResult b{solve_integral(e8_inverse(), v1), v1, std::sqrt(d1)};
  if (d1 < d0 || (d1 == d0 && lex_less(b.coeffs, a.coeffs))) return b;
  return a;
}

CvpResult babai(const Lattice& l, const Vector& target) {
  check_target(l, target);
  const int n = l.dim();
  const Vector w = l.inv_reduced() * target;
  const Matrix& mu = l.gso().mu;
  Coeffs z(n);
  for (int i = n - 1; i >= 0; --i) {
    double ci = w(i);
    for (int j = i + 1; j < n; ++j) ci += mu(j, i) * (w(j) - static_cast<double>(z(j)));
    z(i) = static_cast<std::int64_t>(std::nearbyint(ci));
  }
  return finish(l, target, std::move(z));
}

CvpResult decode_enum(const Lattice& l, const Vector& target,
                      std::uint64_t node_budget) {
  check_target(l, target);
  const int n = l.dim();
  const Vector w = l.inv_reduced() * target;
  CvpResult start = babai(l, target);
  std::array<std::int64_t, kMaxEnumDim> best{};
  std::copy(start.coeffs.data(), start.coeffs.data() + n, best.begin());
  double best_d2 = start.dist * start.dist;
  // The origin is always a candidate and often closer than the Babai point.
  const double t2 = target.squaredNorm();
  if (t2 < best_d2) {
    best.fill(0);
    best_d2 = t2;
  }
  double r2 = best_d2;
  try {
    enumerate(l, w.data(), r2, node_budget, [&](const std::int64_t* z, double d2) {
      const bool closer = d2 < best_d2 * (1.0 - kTieTol);
      const bool tie = !closer && d2 <= best_d2 * (1.0 + kTieTol);
      if (closer || (tie && lex_less(z, best.data(), n))) {
        std::copy(z, z + n, best.begin());
        best_d2 = std::min(best_d2, d2);
        r2 = best_d2;
      }
      return false;
    });
  } catch (const std::length_error&) {
    Coeffs c = Eigen::Map<const Coeffs>(best.data(), n);
    throw BudgetExceeded("CVP enumeration exceeded its node budget",
                         finish(l, target, std::move(c)));
  }
  Coeffs c = Eigen::Map<const Coeffs>(best.data(), n);
  return finish(l, target, std::move(c));
}

bool in_voronoi_enum(const Lattice& l, const Vector& target, std::uint64_t node_budget) {
  check_target(l, target);
  const int n = l.dim();
  const Vector w = l.inv_reduced() * target;
  const double t2 = target.squaredNorm();
  if (t2 == 0.0) return true;
  double r2 = t2;
  bool inside = true;
  try {
    enumerate(l, w.data(), r2, node_budget, [&](const std::int64_t* z, double d2) {
      int first = 0;
      while (first < n && z[first] == 0) ++first;
      if (first == n) return false;
      const bool closer = d2 < t2 * (1.0 - kTieTol);
      const bool tie = !closer && d2 <= t2 * (1.0 + kTieTol);
      // On a tie the lexicographically smaller coefficient vector wins.
      if (closer || (tie && z[first] < 0)) {
        inside = false;
        return true;
      }
      return false;
    });
  } catch (const std::length_error&) {
    throw BudgetExceeded("Voronoi membership enumeration exceeded its node budget",
                         finish(l, target, Coeffs::Zero(n)));
  }
  return inside;
}

CvpResult decode_brute(const Lattice& l, const Vector& target, int box) {
  check_target(l, target);
  const int n = l.dim();
  if (box < 0) throw InvalidArgument("brute-force box must be >= 0");
  if (n * std::log(std::max(box, 1)) > std::log(1e8))
    throw InvalidArgument("brute-force box^k exceeds 10^8 points");
  const Coeffs center = babai(l, target).coeffs;
  const Matrix& b = l.reduced();
  Coeffs off = Coeffs::Constant(n, -box);
  Coeffs best = center;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (;;) {
    const Coeffs z = center + off;
    const double d2 = (target - b * z.cast<double>()).squaredNorm();
    const bool closer = d2 < best_d2 * (1.0 - kTieTol);
    const bool tie = !closer && d2 <= best_d2 * (1.0 + kTieTol);
    if (closer || (tie && lex_less(z, best))) {
      best = z;
      best_d2 = std::min(best_d2, d2);
    }
    int i = 0;
    while (i < n && off(i) == box) off(i++) = -box;
    if (i == n) break;
    ++off(i);
  }
  return finish(l, target, std::move(best));
}

std::uint64_t enumerate_ball_count(const Lattice& l, double radius,
                                   std::uint64_t node_budget) {
  if (l.dim() > kMaxEnumDim)
    throw InvalidArgument("enumeration supports k <= " + std::to_string(kMaxEnumDim));
  if (!(radius > 0.0)) return 0;
  const int n = l.dim();
  std::array<double, kMaxEnumDim> w{};
  const double bound = radius * radius;
  double r2 = bound;
  std::uint64_t count = 0;
  try {
    enumerate(l, w.data(), r2, node_budget, [&](const std::int64_t* z, double d2) {
      if (!(d2 < bound)) return false;
      for (int i = 0; i < n; ++i) {
        if (z[i] != 0) {
          ++count;
          return false;
        }
      }
      return false;
    });
  } catch (const std::length_error&) {
    throw InvalidArgument("point count exceeded the enumeration budget");
  }
  return count;
}

std::string to_string(DecoderKind kind) {
  switch (kind) {
    case DecoderKind::kAuto: return "auto";
    case DecoderKind::kZk: return "zk";
    case DecoderKind::kDk: return "dk";
    case DecoderKind::kE8: return "e8";
    case DecoderKind::kEnum: return "enum";
  }
  return "unknown";
}

Decoder::Decoder(LatticePtr lattice, DecoderKind kind, std::uint64_t node_budget)
    : lattice_(std::move(lattice)), kind_(kind), node_budget_(node_budget) {
  if (!lattice_) throw InvalidArgument("decoder needs a lattice");
  if (kind_ == DecoderKind::kAuto) {
    switch (lattice_->structure()) {
      case Structure::kZk: kind_ = DecoderKind::kZk; break;
      case Structure::kDk: kind_ = DecoderKind::kDk; break;
      case Structure::kE8: kind_ = DecoderKind::kE8; break;
      case Structure::kGeneral: kind_ = DecoderKind::kEnum; break;
    }
  }
  const auto want = [&](Structure s) {
    if (lattice_->structure() != s)
      throw InvalidArgument("decoder " + to_string(kind_) +
                            " does not match the lattice structure");
  };
  if (kind_ == DecoderKind::kZk) want(Structure::kZk);
  if (kind_ == DecoderKind::kDk) want(Structure::kDk);
  if (kind_ == DecoderKind::kE8) want(Structure::kE8);
  if (kind_ == DecoderKind::kEnum && lattice_->dim() > kMaxEnumDim)
    throw InvalidArgument("enumeration supports k <= " + std::to_string(kMaxEnumDim));
}

bool Decoder::in_cell(const Vector& target) const {
  if (kind_ == DecoderKind::kEnum) {
    if (target.size() != lattice_->dim())
      throw InvalidArgument("target dimension does not match the lattice");
    return in_voronoi_enum(*lattice_, target, node_budget_);
  }
  return decode(target).coeffs.isZero();
}

CvpResult Decoder::decode(const Vector& target) const {
  const Lattice& l = *lattice_;
  if (target.size() != l.dim())
    throw InvalidArgument("target dimension does not match the lattice");
  if (kind_ == DecoderKind::kEnum) return decode_enum(l, target, node_budget_);
  // Structured lattices are the canonical lattice scaled by l.scale().
  const Vector t = target / l.scale();
  CvpResult r;
  switch (kind_) {
    case DecoderKind::kZk: r = decode_zk(t); break;
    case DecoderKind::kDk: r = decode_dk(t); break;
    default: r = decode_e8(t); break;
  }
  Vector v = r.vector * l.scale();
  return finish(l, target, solve_integral(l.inv_reduced(), v));
}

}  // namespace llsh
