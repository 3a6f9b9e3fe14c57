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

#ifndef LLSH_ANALYSIS_H_
#define LLSH_ANALYSIS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "llsh/lattice.h"
#include "llsh/stats.h"

namespace llsh::analysis {

enum class Method { kQuadrature, kMonteCarlo };

std::string to_string(Method m);

struct IntegralOptions {
  double rel_tol = 1e-6;
  std::uint64_t mc_samples = 1'000'000;
  std::uint64_t seed = 1;
  int workers = 1;
};

// I(delta^2) or q_delta. The value is carried as a natural log; err_est is
// relative (quadrature error estimate, or Monte Carlo standard error / mean).
struct IntegralResult {
  double log_value = 0.0;
  int k = 0;
  double delta_sq = 0.0;
  Method method = Method::kQuadrature;
  double err_est = 0.0;
  std::uint64_t samples = 0;
  // delta_sq inside [1, k], the regime of the two-sided estimates on I.
  bool in_regime = true;

  double value() const;
};

// I(D^2) = int_{V_x <= k/8} E_{y ~ N(0, D^2/k I)} exp(-V_x - V_{x+y}) dx.
//
// By rotational symmetry only r = |x|, the component y1 of y along x and
// s^2 = |y_perp|^2 ~ (D^2/k) chi^2(k-1) matter:
//   I = int_0^{k/8} e^{-v} E[exp(-V_B ((r + y1)^2 + s^2)^{k/2})] dv,
// with v = V_B r^k. Quadrature nests adaptive Gauss-Kronrod rules over
// (ln v, y1, chi^2) in log space. Monte Carlo draws (y1, chi^2) from a
// proposal centred on the integrand's mode (weights are the exact density
// ratios; chi^2 variates are sums of squared normals) and integrates v by
// quadrature per sample.
//
// Throws AccuracyFailure if the relative error estimate exceeds 1e-3.
IntegralResult integral_i(int k, double delta_sq, Method method,
                          const IntegralOptions& opt = {});

// q_D = Pr_{u uniform in r_k B, g ~ N(0, I/k)}[|u + D g| <= r_k] with r_k the
// radius of the unit-volume ball. The Monte Carlo variant samples u and g
// directly (Gaussian direction, U^(1/k) radius).
IntegralResult ball_q(int k, double delta, Method method,
                      const IntegralOptions& opt = {});

// Lower and upper sides of E_L[p_D] in terms of I:
//   I(D^2) - e^{-k/8}  <=  E_L[p_D]  <=  4 I(4^{-2/k} D^2) + 3 e^{-k/8}.
struct SandwichBounds {
  double lower = 0.0;
  double upper = 0.0;
  double i_delta = 0.0;
  double i_shrunk = 0.0;
};

SandwichBounds sandwich_bounds(int k, double delta, const IntegralOptions& opt = {});

struct SandwichReport {
  int k = 0;
  double delta = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> per_lattice;
  MeanStat mean;
  SandwichBounds bounds;
  bool pass = false;
  bool low_power = false;
};

// Empirical mean of p_hat over the lattice sample against both bounds; the
// verdict allows 3 standard errors of slack on either side. Lattice j is
// estimated with seed (seed + j).
SandwichReport check_sandwich(const std::vector<LatticePtr>& lattices, double delta,
                              std::uint64_t trials, std::uint64_t seed, int workers = 1);

// mean(p^gamma) >= (mean p)^gamma, up to 1e-12 relative rounding slack.
bool jensen_holds(const std::vector<double>& p, double gamma);

struct ExponentReport {
  int k = 0;
  double c = 1.0;
  double envelope = 10.0;
  double tau = 0.0;
  // -ln I(beta sqrt k) * 8 / (tau^2 sqrt k) for beta = 1 and beta = c^2.
  double multiplier_1 = 0.0;
  double multiplier_c2 = 0.0;
  double deviation_1 = 0.0;   // |multiplier_1 - 1|
  double deviation_c2 = 0.0;  // |multiplier_c2 / c^2 - 1|
  bool pass = false;
};

inline constexpr double kDefaultEnvelope = 10.0;

// Effective exponent multipliers of I at beta = 1 and beta = c^2. Passes when
// |m(beta) / beta - 1| <= envelope * beta / sqrt(k) for both. Requires
// 1 <= c and c^2 <= sqrt(k).
ExponentReport check_exponents(int k, double c, double envelope = kDefaultEnvelope);

// The multiplier for one beta.
double exponent_multiplier(int k, double beta);

struct SchmidtPair {
  double v_union = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  Estimate estimate;
  bool pass = false;
};

struct SchmidtApReport {
  int k = 0;
  std::uint64_t lattices = 0;
  std::uint64_t seed = 0;
  double v_lo = 0.0, v_hi = 0.0;
  std::vector<SchmidtPair> pairs;
  double pass_fraction = 0.0;
  bool pass = false;
};

struct SchmidtApOptions {
  int pairs = 50;
  std::uint64_t lattices = 2000;
  double v_lo = 0.5;
  double v_hi = 2.0;
  std::uint64_t p = 0;  // 0 selects the default ensemble modulus
  std::uint64_t seed = 1;
  int workers = 1;
};

// For random (x, y) with V_{x,y} in [v_lo, v_hi], estimates
// Pr_L[x, x + y both in the Voronoi cell] over ensemble lattices and checks
//   e^{-V_{x,y}} - e^{-k/4} <= Pr <= e^{-V_{x,y}/2} + e^{-k/4}
// with 3 standard errors of slack. Passes when >= 95% of pairs pass.
// Requires k >= 13.
SchmidtApReport check_schmidt_ap(int k, const SchmidtApOptions& opt);

}  // namespace llsh::analysis

#endif  // LLSH_ANALYSIS_H_
