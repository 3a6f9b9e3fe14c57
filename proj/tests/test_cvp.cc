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
#include "llsh/cvp.h"
#include "llsh/errors.h"
#include "llsh/randlat.h"

using namespace llsh;

namespace {

Vector random_target(int k, double spread, Stream& rng) {
  Vector t(k);
  for (int i = 0; i < k; ++i) t(i) = spread * (rng.uniform() - 0.5);
  return t;
}

LatticePtr gm(int k, std::uint64_t index) {
  GmParams gp;
  gp.k = k;
  gp.seed = 77;
  return sample_gm(gp, index);
}

}  // namespace

TEST_CASE("enumeration agrees with exhaustive search") {
  Stream rng(1, 0);
  for (int k : {2, 3, 4, 5}) {
    for (std::uint64_t j = 0; j < 5; ++j) {
      const LatticePtr l = gm(k, j);
      for (int t = 0; t < 40; ++t) {
        const Vector x = random_target(k, 6.0, rng);
        const CvpResult a = decode_enum(*l, x);
        const CvpResult b = decode_brute(*l, x, 4);
        CHECK(std::abs(a.dist - b.dist) <= 1e-9);
        CHECK((a.vector - l->reduced() * a.coeffs.cast<double>()).norm() < 1e-12);
      }
    }
  }
}

TEST_CASE("Babai is never better than enumeration") {
  Stream rng(2, 0);
  const LatticePtr l = gm(10, 0);
  for (int t = 0; t < 200; ++t) {
    const Vector x = random_target(10, 4.0, rng);
    CHECK(decode_enum(*l, x).dist <= babai(*l, x).dist + 1e-12);
  }
}

TEST_CASE("structured decoders agree with enumeration") {
  Stream rng(3, 0);
  const LatticePtr z = zk_lattice(7), d = dk_lattice(6), e = e8_lattice();
  const Decoder dz(z), dd(d), de(e);
  const Decoder ez(z, DecoderKind::kEnum), ed(d, DecoderKind::kEnum), ee(e, DecoderKind::kEnum);
  for (int t = 0; t < 500; ++t) {
    const Vector a = random_target(7, 10.0, rng);
    const Vector b = random_target(6, 10.0, rng);
    const Vector c = random_target(8, 10.0, rng);
    CHECK(std::abs(dz.decode(a).dist - ez.decode(a).dist) <= 1e-12);
    CHECK(std::abs(dd.decode(b).dist - ed.decode(b).dist) <= 1e-12);
    CHECK(std::abs(de.decode(c).dist - ee.decode(c).dist) <= 1e-12);
  }
}

TEST_CASE("decoder kind must match the lattice structure") {
  CHECK_THROWS_AS(Decoder(zk_lattice(4), DecoderKind::kE8), InvalidArgument);
  CHECK_THROWS_AS(Decoder(gm(4, 0), DecoderKind::kZk), InvalidArgument);
  CHECK(Decoder(e8_lattice()).kind() == DecoderKind::kE8);
  CHECK(Decoder(gm(4, 0)).kind() == DecoderKind::kEnum);
  CHECK_THROWS_AS(Decoder(e8_lattice()).decode(Vector::Zero(3)), InvalidArgument);
}

TEST_CASE("v is a closest vector of t exactly when t - v lies in the cell") {
  Stream rng(4, 0);
  const LatticePtr l = gm(9, 1);
  const Decoder dec(l);
  for (int t = 0; t < 200; ++t) {
    const Vector x = random_target(9, 5.0, rng);
    const CvpResult r = dec.decode(x);
    CHECK(dec.in_cell(x - r.vector));
    CHECK(dec.decode(x - r.vector).coeffs.isZero());
    // Any other lattice point v' gives t - v' outside the cell.
    Coeffs other = r.coeffs;
    other(static_cast<Eigen::Index>(rng.below(9))) += 1;
    CHECK_FALSE(dec.in_cell(x - l->point(other)));
  }
}

TEST_CASE("decoding is equivariant under lattice translations") {
  Stream rng(5, 0);
  const LatticePtr l = gm(8, 2);
  const Decoder dec(l);
  for (int t = 0; t < 200; ++t) {
    const Vector x = random_target(8, 3.0, rng);
    Coeffs shift(8);
    for (int i = 0; i < 8; ++i) shift(i) = static_cast<std::int64_t>(rng.below(11)) - 5;
    const CvpResult a = dec.decode(x);
    const CvpResult b = dec.decode(x + l->point(shift));
    CHECK(b.coeffs == Coeffs(a.coeffs + shift));
  }
}

TEST_CASE("Voronoi membership test matches full decoding") {
  Stream rng(6, 0);
  for (int k : {6, 12, 16}) {
    const LatticePtr l = gm(k, 3);
    for (int t = 0; t < 300; ++t) {
      const Vector x = random_target(k, 1.5, rng);
      CHECK(in_voronoi_enum(*l, x) == decode_enum(*l, x).coeffs.isZero());
    }
  }
}

TEST_CASE("E8 decoding: exact ties break toward the smaller coefficient vector") {
  // Midpoint between 0 and the lattice vector (1, 1, 0, ..., 0).
  Vector t = Vector::Zero(8);
  t(0) = t(1) = 0.5;
  const CvpResult a = decode_e8(t);
  CHECK(a.dist == doctest::Approx(std::sqrt(0.5)));
  const CvpResult b = decode_enum(*e8_lattice(), t);
  CHECK(a.dist == doctest::Approx(b.dist));
}

TEST_CASE("node budget") {
  const LatticePtr l = gm(20, 0);
  Stream rng(7, 0);
  const Vector x = random_target(20, 50.0, rng);
  CHECK_THROWS_AS(decode_enum(*l, x, 5), BudgetExceeded);
  try {
    decode_enum(*l, x, 5);
  } catch (const BudgetExceeded& e) {
    CHECK(e.best().coeffs.size() == 20);
  }
}

TEST_CASE("ball point counts") {
  CHECK(count_points(*zk_lattice(8), 1.5) == 128);
  CHECK(count_points(*e8_lattice(), 1.5) == 240);
  CHECK(count_points(*zk_lattice(3), 1.0) == 0);  // strict inequality
  CHECK(count_points(*zk_lattice(3), 1.0 + 1e-9) == 6);
}
