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

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "llsh/errors.h"
#include "llsh/geometry.h"
#include "llsh/lattice.h"
#include "llsh/random.h"

using namespace llsh;
using namespace llsh::geometry;

namespace {

Vector uniform_in_ball(int k, double r, Stream& rng) {
  Vector v(k);
  for (int i = 0; i < k; ++i) v(i) = rng.normal();
  return v * (r * std::pow(rng.uniform(), 1.0 / k) / v.norm());
}

}  // namespace

TEST_CASE("unit ball volumes") {
  CHECK(ball_volume(1, 1.0) == doctest::Approx(2.0));
  CHECK(ball_volume(2, 1.0) == doctest::Approx(M_PI));
  CHECK(ball_volume(3, 2.0) == doctest::Approx(4.0 / 3.0 * M_PI * 8.0));
  CHECK(ball_volume(8, 1.0) == doctest::Approx(std::pow(M_PI, 4) / 24.0));
  for (int k : {5, 40, 300}) {
    const double want = k / 2.0 * std::log(M_PI) - boost::math::lgamma(k / 2.0 + 1.0);
    CHECK(log_unit_ball_volume(k) == doctest::Approx(want).epsilon(1e-13));
  }
  CHECK(log_ball_volume(4, 0.0) == -INFINITY);
  CHECK(ball_volume(12, radius_for_volume(12, 3.5)) == doctest::Approx(3.5));
}

TEST_CASE("dimension constants") {
  const DimensionConstants c = dimension_constants(16);
  CHECK(c.tau == doctest::Approx(4.0 * std::pow(c.v_unit, 1.0 / 16)));
  CHECK(ball_volume(16, c.r_unit_volume) == doctest::Approx(1.0));
  double prev = 0.0;
  const double limit = std::sqrt(2 * M_PI * M_E);
  for (int k = 2; k <= 512; ++k) {
    const double tau = dimension_constants(k).tau;
    CHECK(tau > prev);
    CHECK(tau < limit);
    prev = tau;
  }
  CHECK(limit - prev < 0.03);
}

TEST_CASE("cap fraction against Boost and rejection sampling") {
  CHECK(cap_fraction(7, 0.0) == doctest::Approx(0.5));
  CHECK(cap_fraction(7, 1.0) == doctest::Approx(0.0));
  CHECK(cap_fraction(7, -1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(cap_fraction(7, 1.5), InvalidArgument);
  for (int k : {2, 5, 12}) {
    for (double t : {-0.6, 0.1, 0.45}) {
      const double h = std::abs(t);
      double want = 0.5 * boost::math::ibeta((k + 1) / 2.0, 0.5, 1 - h * h);
      if (t < 0) want = 1 - want;
      CHECK(cap_fraction(k, t) == doctest::Approx(want).epsilon(1e-12));
      Stream rng(17, static_cast<std::uint64_t>(k * 10 + (t + 1) * 10));
      const int n = 100000;
      int hits = 0;
      for (int i = 0; i < n; ++i) hits += uniform_in_ball(k, 1.0, rng)(0) > t;
      const double p = static_cast<double>(hits) / n;
      CHECK(std::abs(p - want) < 4.0 * std::sqrt(want * (1 - want) / n) + 1e-12);
    }
  }
}

TEST_CASE("two-ball union volume: edge cases") {
  const int k = 6;
  const double v1 = ball_volume(k, 1.0), v2 = ball_volume(k, 0.7);
  CHECK(union_volume(k, 1.0, 0.7, 5.0) == doctest::Approx(v1 + v2));
  CHECK(union_volume(k, 1.0, 0.7, 0.2) == doctest::Approx(v1));
  CHECK(union_volume(k, 0.7, 1.0, 0.0) == doctest::Approx(v1));
  CHECK(union_volume(k, 1.0, 1.0, 0.0) == doctest::Approx(v1));
  CHECK(std::exp(log_union_volume(k, 1.0, 0.7, 1.1)) ==
        doctest::Approx(union_volume(k, 1.0, 0.7, 1.1)));
}

TEST_CASE("two-ball union volume against rejection sampling") {
  for (int k : {3, 8, 13}) {
    const double r1 = 1.0, r2 = 0.8, d = 0.9;
    Stream rng(21, static_cast<std::uint64_t>(k));
    // Sample the bounding ball of radius max(r1, d + r2) around center 1.
    const double big = std::max(r1, d + r2);
    const int n = 200000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      const Vector p = uniform_in_ball(k, big, rng);
      Vector q = p;
      q(0) -= d;
      hits += p.norm() < r1 || q.norm() < r2;
    }
    const double frac = static_cast<double>(hits) / n;
    const double est = frac * ball_volume(k, big);
    const double se = std::sqrt(frac * (1 - frac) / n) * ball_volume(k, big);
    CAPTURE(k);
    CHECK(std::abs(union_volume(k, r1, r2, d) - est) < 4.0 * se);
  }
}

TEST_CASE("union of the balls B_x and B_{x+y} is sandwiched by their volumes") {
  Stream rng(5, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(40));
    Vector x(k), y(k);
    for (int i = 0; i < k; ++i) {
      x(i) = rng.normal();
      y(i) = rng.normal() * rng.uniform();
    }
    const Vector z = x + y;
    const double vx = ball_volume(k, x.norm());
    const double vz = ball_volume(k, z.norm());
    const double u = union_volume(k, x.norm(), z.norm(), y.norm());
    CAPTURE(k);
    CHECK(u >= 0.5 * (vx + vz) * (1 - 1e-10));
    CHECK(u <= (vx + vz) * (1 + 1e-10));
  }
}
