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

#include <cmath>

#include "doctest.h"
#include "llsh/errors.h"
#include "llsh/geometry.h"
#include "llsh/randlat.h"

using namespace llsh;

namespace {

bool trial_division_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("primality against trial division") {
  for (std::uint64_t n = 0; n < 5000; ++n) CHECK(is_prime(n) == trial_division_prime(n));
  for (std::uint64_t n = (1ULL << 32) - 50; n < (1ULL << 32) + 50; ++n)
    CHECK(is_prime(n) == trial_division_prime(n));
  CHECK(next_prime(1ULL << 20) == kDefaultModulus);
  CHECK(is_prime(18446744073709551557ULL));  // largest 64-bit prime
  CHECK_FALSE(is_prime(3215031751ULL));      // strong pseudoprime to bases 2, 3, 5, 7
}

TEST_CASE("q-ary basis shape and determinant") {
  Stream rng(1, 0);
  const Matrix b = gm_basis(6, kDefaultModulus, rng);
  CHECK(std::abs(b.partialPivLu().determinant()) == doctest::Approx(static_cast<double>(kDefaultModulus)));
  for (int i = 1; i < 6; ++i) {
    CHECK(b(i, i) == 1.0);
    CHECK(b(0, i) >= 0.0);
    CHECK(b(0, i) < static_cast<double>(kDefaultModulus));
  }
  CHECK_THROWS_AS(gm_basis(6, 1048584, rng), InvalidArgument);
  CHECK_THROWS_AS(gm_basis(6, 65521, rng), InvalidArgument);  // prime but below 2^16
}

TEST_CASE("ensemble lattices are reproducible and normalized") {
  GmParams gp;
  gp.k = 7;
  gp.seed = 4;
  const LatticePtr a = sample_gm(gp, 3);
  const LatticePtr b = sample_gm(gp, 3);
  const LatticePtr c = sample_gm(gp, 4);
  CHECK(a->basis() == b->basis());
  CHECK(a->basis() != c->basis());
  CHECK(std::abs(a->reduced().partialPivLu().determinant()) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(a->id() == "gm:1048583");
}

TEST_CASE("regions") {
  Region r;
  Ball b;
  b.center = Vector::Zero(5);
  b.center(0) = 2.0;
  b.radius = 1.0;
  r.balls.push_back(b);
  CHECK(r.volume() == doctest::Approx(geometry::ball_volume(5, 1.0)));
  CHECK_FALSE(r.contains_origin());
  Ball c = b;
  c.center(0) = 0.5;
  r.balls.push_back(c);
  CHECK(r.contains_origin());
  CHECK(r.volume() == doctest::Approx(geometry::union_volume(5, 1.0, 1.0, 1.5)));
  GmParams gp;
  gp.k = 5;
  CHECK_THROWS_AS(empty_probability(gp, r, 10), InvalidArgument);
}

TEST_CASE("Siegel mean and Schmidt emptiness at moderate size") {
  GmParams gp;
  gp.k = 6;
  gp.p = 4294967311ULL;
  const MeanStat m = mean_stat(siegel_counts(gp, 2.0, 1500));
  CHECK(std::abs(m.mean - 2.0) < 3.5 * m.stderr_);

  Region r;
  Ball b;
  b.radius = geometry::radius_for_volume(10, 1.0);
  b.center = Vector::Zero(10);
  b.center(1) = 2 * b.radius;
  r.balls.push_back(b);
  GmParams g10;
  g10.k = 10;
  const Estimate e = empty_probability(g10, r, 1500);
  CHECK(std::abs(e.p_hat - std::exp(-1.0)) <= 0.02 + 3 * e.ci_half);
}

TEST_CASE("Voronoi tail fraction") {
  GmParams gp;
  gp.k = 12;
  const Decoder dec(sample_gm(gp, 0));
  const double f = rogers_tail_fraction(dec, 20000, 3);
  CHECK(f >= 0.0);
  CHECK(f <= 4 * std::exp(-12.0 / 8.0));
  // Z^2: V_x = pi |x|^2 > 1/4 for |x| > 0.282, which excludes a central disc
  // of area 1/4 from the unit square cell.
  const double z = rogers_tail_fraction(Decoder(zk_lattice(2)), 100000, 4);
  CHECK(z == doctest::Approx(0.75).epsilon(0.01));
}
