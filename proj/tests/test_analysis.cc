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

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "llsh/analysis.h"
#include "llsh/errors.h"
#include "llsh/geometry.h"
#include "llsh/randlat.h"

using namespace llsh;
using namespace llsh::analysis;

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

// I(D^2) through |x + y|^2 ~ sigma^2 * noncentral chi^2(k, |x|^2 / sigma^2):
// int_0^{k/8} e^{-v} E[exp(-V_B |x + y|^k)] dv.
double i_oracle(int k, double delta_sq) {
  const double sigma2 = delta_sq / k;
  const double vb = geometry::ball_volume(k, 1.0);
  auto inner = [&](double v) {
    const double r2 = std::pow(v / vb, 2.0 / k);
    const boost::math::non_central_chi_squared_distribution<> nc(k, r2 / sigma2);
    // Beyond w_max the weight exp(-V_B (sigma^2 w)^{k/2}) is below 1e-300.
    const double w_max = std::pow(700.0 / vb, 2.0 / k) / sigma2;
    auto g = [&](double w) {
      return boost::math::pdf(nc, w) * std::exp(-vb * std::pow(sigma2 * w, k / 2.0));
    };
    return GK::integrate(g, 0.0, w_max, 15, 1e-12);
  };
  auto outer = [&](double v) { return std::exp(-v) * inner(v); };
  return GK::integrate(outer, 0.0, k / 8.0, 15, 1e-10);
}

// q_D through |u + D g|^2 ~ (D^2/k) noncentral chi^2(k, |u|^2 k / D^2).
double q_oracle(int k, double delta) {
  const double rk = geometry::radius_for_volume(k, 1.0);
  const double s2 = delta * delta / k;
  auto f = [&](double v) {
    const double r = rk * std::pow(v, 1.0 / k);
    const boost::math::non_central_chi_squared_distribution<> nc(k, r * r / s2);
    return boost::math::cdf(nc, rk * rk / s2);
  };
  return GK::integrate(f, 0.0, 1.0, 15, 1e-10);
}

}  // namespace

TEST_CASE("integral matches a noncentral chi-square oracle") {
  for (int k : {4, 8, 16}) {
    for (double beta : {0.5, 1.0, 2.0}) {
      const double d2 = beta * std::sqrt(static_cast<double>(k));
      CAPTURE(k);
      CAPTURE(beta);
      const IntegralResult r = integral_i(k, d2, Method::kQuadrature);
      CHECK(r.value() == doctest::Approx(i_oracle(k, d2)).epsilon(1e-6));
      CHECK(r.err_est < 1e-3);
    }
  }
}

TEST_CASE("small-perturbation limit") {
  for (int k : {1, 8, 40}) {
    const IntegralResult r = integral_i(k, 1e-8, Method::kQuadrature);
    CHECK(r.value() == doctest::Approx((1 - std::exp(-k / 4.0)) / 2).epsilon(1e-6));
    CHECK_FALSE(r.in_regime);
  }
  CHECK(integral_i(8, 2.0, Method::kQuadrature).in_regime);
}

TEST_CASE("integral is non-increasing in delta and bounded by the truncated mass") {
  for (int k : {12, 48}) {
    double prev = 1.0;
    for (double d2 = 0.25; d2 <= 4 * k; d2 *= 1.5) {
      const double v = integral_i(k, d2, Method::kQuadrature).value();
      CHECK(v <= prev * (1 + 1e-9));
      CHECK(v <= 1 - std::exp(-k / 8.0));
      CHECK(v > 0.0);
      prev = v;
    }
  }
}

TEST_CASE("quadrature and Monte Carlo agree") {
  IntegralOptions opt;
  opt.mc_samples = 20000;
  for (int k : {8, 32}) {
    for (double beta : {1.0, 2.0}) {
      const double d2 = beta * std::sqrt(static_cast<double>(k));
      const IntegralResult q = integral_i(k, d2, Method::kQuadrature);
      const IntegralResult m = integral_i(k, d2, Method::kMonteCarlo, opt);
      CAPTURE(k);
      CAPTURE(beta);
      CHECK(std::abs(m.value() / q.value() - 1) < 4 * m.err_est + 1e-3);
      CHECK(m.err_est < 0.05);
    }
  }
}

TEST_CASE("Monte Carlo integral is worker-count independent") {
  IntegralOptions a, b;
  a.mc_samples = b.mc_samples = 3000;
  b.workers = 4;
  CHECK(integral_i(16, 4.0, Method::kMonteCarlo, a).log_value ==
        integral_i(16, 4.0, Method::kMonteCarlo, b).log_value);
}

TEST_CASE("invalid integral arguments") {
  CHECK_THROWS_AS(integral_i(0, 1.0, Method::kQuadrature), InvalidArgument);
  CHECK_THROWS_AS(integral_i(8, -1.0, Method::kQuadrature), InvalidArgument);
  CHECK_THROWS_AS(ball_q(8, 0.0, Method::kQuadrature), InvalidArgument);
}

TEST_CASE("ball baseline against the noncentral chi-square oracle and sampling") {
  for (int k : {4, 16, 64}) {
    const double d = std::pow(k, 0.25);
    CAPTURE(k);
    CHECK(ball_q(k, d, Method::kQuadrature).value() == doctest::Approx(q_oracle(k, d)).epsilon(1e-6));
  }
  IntegralOptions opt;
  opt.mc_samples = 400000;
  const IntegralResult q = ball_q(16, 2.0, Method::kQuadrature);
  const IntegralResult m = ball_q(16, 2.0, Method::kMonteCarlo, opt);
  const double sq = q.err_est * q.value(), sm = m.err_est * m.value();
  CHECK(std::abs(q.value() - m.value()) <= 3 * std::sqrt(sq * sq + sm * sm));
  CHECK(ball_q(10, 1e-4, Method::kQuadrature).value() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("ball exponent ratio decreases toward 1/4 with dimension") {
  double prev = 1.0;
  for (int k : {16, 64, 144}) {
    const double d = std::pow(k, 0.25);
    const double ratio = ball_q(k, d, Method::kQuadrature).log_value /
                         ball_q(k, 2 * d, Method::kQuadrature).log_value;
    CAPTURE(k);
    CHECK(ratio < prev);
    CHECK(ratio > 0.25);
    prev = ratio;
  }
  const double d64 = std::pow(64.0, 0.25);
  const double r64 = ball_q(64, d64, Method::kQuadrature).log_value /
                     ball_q(64, 2 * d64, Method::kQuadrature).log_value;
  CHECK(r64 == doctest::Approx(0.37891).epsilon(1e-4));
}

TEST_CASE("sandwich bounds and report plumbing") {
  const SandwichBounds b = sandwich_bounds(16, 2.0);
  CHECK(b.lower == doctest::Approx(b.i_delta - std::exp(-2.0)));
  CHECK(b.upper == doctest::Approx(4 * b.i_shrunk + 3 * std::exp(-2.0)));
  CHECK(b.i_shrunk >= b.i_delta);
  GmParams gp;
  gp.k = 12;
  const SandwichReport one = check_sandwich({sample_gm(gp, 0)}, std::pow(12.0, 0.25), 5000, 1);
  CHECK(one.low_power);
  CHECK(one.per_lattice.size() == 1);
  CHECK_THROWS_AS(check_sandwich({}, 1.0, 100, 1), InvalidArgument);
  CHECK_THROWS_AS(check_sandwich({sample_gm(gp, 0), e8_lattice()}, 1.0, 100, 1), InvalidArgument);
}

TEST_CASE("sandwich verdict at k = 12") {
  GmParams gp;
  gp.k = 12;
  std::vector<LatticePtr> ls;
  for (std::uint64_t j = 0; j < 30; ++j) ls.push_back(sample_gm(gp, j));
  const SandwichReport r = check_sandwich(ls, std::pow(12.0, 0.25), 4000, 5);
  CHECK(r.pass);
  CHECK_FALSE(r.low_power);
}

TEST_CASE("Jensen check") {
  CHECK(jensen_holds({0.1, 0.2, 0.3}, 1.0));
  CHECK(jensen_holds({0.1, 0.2, 0.3}, 2.25));
  CHECK(jensen_holds({0.5, 0.5}, 4.0));
  CHECK_THROWS_AS(jensen_holds({}, 2.0), InvalidArgument);
  CHECK_THROWS_AS(jensen_holds({0.1}, 0.5), InvalidArgument);
}

TEST_CASE("exponent report") {
  const ExponentReport same = check_exponents(16, 1.0);
  CHECK(same.multiplier_1 == same.multiplier_c2);
  CHECK_THROWS_AS(check_exponents(16, 2.5), InvalidArgument);
  const ExponentReport r256 = check_exponents(256, 1.5);
  CHECK(r256.deviation_1 <= 10.0 / 16.0);
  CHECK(r256.pass);
  const double dev64 = check_exponents(64, 2.0).deviation_c2;
  const double dev256 = check_exponents(256, 2.0).deviation_c2;
  CHECK(dev256 < dev64);
}

TEST_CASE("two-point emptiness bounds") {
  SchmidtApOptions opt;
  opt.pairs = 8;
  opt.lattices = 300;
  const SchmidtApReport r = check_schmidt_ap(13, opt);
  CHECK(r.pairs.size() == 8);
  for (const auto& p : r.pairs) {
    CHECK(p.v_union >= opt.v_lo);
    CHECK(p.v_union <= opt.v_hi);
    CHECK(p.lower < p.upper);
  }
  CHECK(r.pass_fraction >= 0.75);
  CHECK_THROWS_AS(check_schmidt_ap(12, opt), InvalidArgument);
}
