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

#include "llsh/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "llsh/errors.h"
#include "llsh/numeric.h"

namespace llsh::geometry {
namespace {

constexpr double kContactTol = 1e-12;

void check_dim(int k) {
  if (k < 1) throw InvalidArgument("dimension must be >= 1");
}

}  // namespace

double log_unit_ball_volume(int k) {
  check_dim(k);
  return 0.5 * k * std::log(std::numbers::pi) - std::lgamma(0.5 * k + 1.0);
}

DimensionConstants dimension_constants(int k) {
  DimensionConstants c;
  c.k = k;
  c.log_v_unit = log_unit_ball_volume(k);
  c.v_unit = std::exp(c.log_v_unit);
  c.tau = std::sqrt(static_cast<double>(k)) * std::exp(c.log_v_unit / k);
  c.r_unit_volume = std::exp(-c.log_v_unit / k);
  return c;
}

double log_ball_volume(int k, double r) {
  check_dim(k);
  if (!(r >= 0.0)) throw InvalidArgument("ball radius must be >= 0");
  if (r == 0.0) return kNegInf;
  return log_unit_ball_volume(k) + k * std::log(r);
}

double ball_volume(int k, double r) { return std::exp(log_ball_volume(k, r)); }

double radius_for_volume(int k, double volume) {
  check_dim(k);
  if (!(volume >= 0.0)) throw InvalidArgument("volume must be >= 0");
  if (volume == 0.0) return 0.0;
  return std::exp((std::log(volume) - log_unit_ball_volume(k)) / k);
}

double cap_fraction(int k, double t_over_r) {
  check_dim(k);
  if (!(std::abs(t_over_r) <= 1.0))
    throw InvalidArgument("cap_fraction: |t/r| must be <= 1");
  const double h = std::abs(t_over_r);
  if (h == 1.0) return t_over_r > 0 ? 0.0 : 1.0;
  // Cap beyond height h has volume fraction I_{1-h^2}((k+1)/2, 1/2) / 2.
  const double tail =
      0.5 * incomplete_beta(0.5 * (k + 1), 0.5, (1.0 - h) * (1.0 + h));
  return t_over_r >= 0.0 ? tail : 1.0 - tail;
}

double log_union_volume(int k, double r1, double r2, double d) {
  check_dim(k);
  if (!(r1 >= 0.0) || !(r2 >= 0.0) || !(d >= 0.0))
    throw InvalidArgument("union_volume: radii and distance must be >= 0");
  const double big = std::max(r1, r2);
  const double small = std::min(r1, r2);
  const double tol = kContactTol * std::max(1.0, r1 + r2);
  if (small == 0.0 || d + small <= big + tol) return log_ball_volume(k, big);
  const double l1 = log_ball_volume(k, r1);
  const double l2 = log_ball_volume(k, r2);
  if (d >= r1 + r2 - tol) return log_add(l1, l2);
  // Radical plane at distance a from the first center along the center line.
  const double a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
  const double t1 = std::clamp(-a / r1, -1.0, 1.0);
  const double t2 = std::clamp(-(d - a) / r2, -1.0, 1.0);
  // Ball 1 minus its part beyond the plane, plus ball 2 minus its part on the
  // first side. Both terms are non-negative, so the sum is taken in log space.
  const double f1 = cap_fraction(k, t1);
  const double f2 = cap_fraction(k, t2);
  const double a1 = f1 > 0.0 ? l1 + std::log(f1) : kNegInf;
  const double a2 = f2 > 0.0 ? l2 + std::log(f2) : kNegInf;
  return log_add(a1, a2);
}

double union_volume(int k, double r1, double r2, double d) {
  return std::exp(log_union_volume(k, r1, r2, d));
}

}  // namespace llsh::geometry
