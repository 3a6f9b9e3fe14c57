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

#include "llsh/analysis.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

#include "llsh/cvp.h"
#include "llsh/errors.h"
#include "llsh/geometry.h"
#include "llsh/lshcore.h"
#include "llsh/numeric.h"
#include "llsh/randlat.h"

namespace llsh::analysis {
namespace {

constexpr double kMaxRelErr = 1e-3;
// exp(-kKill) is far below anything that survives in the results.
constexpr double kKill = 745.0;
constexpr double kSigmaSpan = 40.0;

struct LogQuad {
  double log_value = kNegInf;
  double rel_err = 0.0;
};

// log of int_a^b exp(logf(x)) dx. A coarse scan locates the peak, which
// becomes both the scaling shift and a breakpoint for the adaptive rule.
template <typename F>
LogQuad log_integrate(F&& logf, double a, double b, double rel_tol, int scan,
                      std::initializer_list<double> hints = {}) {
  LogQuad out;
  if (!(b > a)) return out;
  double peak = kNegInf;
  double arg = a;
  const double h = (b - a) / scan;
  for (int i = 0; i <= scan; ++i) {
    const double x = std::min(b, a + h * i);
    const double v = logf(x);
    if (v > peak) {
      peak = v;
      arg = x;
    }
  }
  for (double x : hints) {
    if (x > a && x < b) {
      const double v = logf(x);
      if (v > peak) {
        peak = v;
        arg = x;
      }
    }
  }
  if (peak == kNegInf) return out;
  std::vector<double> breaks{arg - h, arg, arg + h};
  for (double x : hints) breaks.push_back(x);
  std::sort(breaks.begin(), breaks.end());
  auto f = [&](double x) {
    const double v = logf(x);
    return v == kNegInf ? 0.0 : std::exp(v - peak);
  };
  QuadOptions qo;
  qo.rel_tol = rel_tol;
  qo.max_intervals = 4000;
  const QuadResult q = integrate(f, a, b, qo, breaks);
  if (!(q.value > 0.0)) return out;
  out.log_value = peak + std::log(q.value);
  out.rel_err = q.abs_err / q.value;
  return out;
}

// Shared geometry of the (v, y1, chi^2) reduction.
struct Reduction {
  int k;
  double log_vb;
  double sigma2;  // per-coordinate variance of y
  double sigma;
  double nu;      // chi-square degrees of freedom of |y_perp|^2 / sigma2

  Reduction(int k_, double delta_sq)
      : k(k_),
        log_vb(geometry::log_unit_ball_volume(k_)),
        sigma2(delta_sq / k_),
        sigma(std::sqrt(delta_sq / k_)),
        nu(k_ - 1.0) {}

  // log of V_B * rho2^(k/2).
  double log_volume(double rho2) const { return log_vb + 0.5 * k * std::log(rho2); }
  double radius(double log_v) const { return std::exp((log_v - log_vb) / k); }
  // rho2 at which the ball volume equals exp(log_v).
  double rho2_at(double log_v) const { return std::exp(2.0 * (log_v - log_vb) / k); }
};

// log E_c[exp(-V_B (a2 + sigma2 c)^{k/2})], c ~ chi^2(nu).
double log_h(const Reduction& m, double a2, double rel_tol) {
  if (m.nu <= 0.0) return -std::exp(m.log_volume(a2));
  const double c_cut = (m.rho2_at(std::log(kKill)) - a2) / m.sigma2;
  if (c_cut <= 0.0) return kNegInf;
  const double c_hi = m.nu + 60.0 * std::sqrt(2.0 * m.nu) + 200.0;
  const double upper = std::min(c_cut, c_hi);
  const double c_one = (m.rho2_at(0.0) - a2) / m.sigma2;
  const double mode = std::max(m.nu - 2.0, 0.0);
  auto logf = [&](double c) {
    if (c <= 0.0) return kNegInf;
    return log_chi_square_pdf(c, m.nu) - std::exp(m.log_volume(a2 + m.sigma2 * c));
  };
  return log_integrate(logf, 0.0, upper, rel_tol, 24, {mode, c_one}).log_value;
}

// log E_{y1, c}[exp(-V_B ((r + y1)^2 + sigma2 c)^{k/2})].
double log_g(const Reduction& m, double r, double rel_tol) {
  const double lo = -kSigmaSpan * m.sigma;
  const double hi = kSigmaSpan * m.sigma;
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * m.sigma2);
  auto logf = [&](double y1) {
    const double lh = log_h(m, (r + y1) * (r + y1), rel_tol * 0.1);
    if (lh == kNegInf) return kNegInf;
    return log_norm - 0.5 * y1 * y1 / m.sigma2 + lh;
  };
  return log_integrate(logf, lo, hi, rel_tol, 64, {0.0, -r}).log_value;
}

IntegralResult integral_quadrature(int k, double delta_sq, double rel_tol) {
  const Reduction m(k, delta_sq);
  const double t_hi = std::log(k / 8.0);
  const double inner_tol = std::min(1e-8, rel_tol * 1e-2);
  auto logf = [&](double t) {
    const double lg = log_g(m, m.radius(t), inner_tol);
    if (lg == kNegInf) return kNegInf;
    return t - std::exp(t) + lg;
  };
  double t_lo = t_hi - 40.0;
  LogQuad q;
  for (;;) {
    q = log_integrate(logf, t_lo, t_hi, rel_tol, 32);
    // The part below t_lo is at most exp(t_lo) * max G on it; G tends to a
    // constant as r -> 0, so its value at t_lo bounds the tail.
    const double tail = logf(t_lo);
    if (q.log_value == kNegInf || tail - q.log_value < std::log(rel_tol * 1e-3) ||
        t_lo < t_hi - 600.0)
      break;
    t_lo -= 40.0;
  }
  IntegralResult res;
  res.k = k;
  res.delta_sq = delta_sq;
  res.method = Method::kQuadrature;
  res.log_value = q.log_value;
  res.err_est = q.rel_err + inner_tol;
  return res;
}

// Integral over v of exp(-v - V_B((r + y1)^2 + s2)^{k/2}) for one (y1, s2).
double log_q_given(const Reduction& m, double y1, double s2, double rel_tol) {
  const double t_hi = std::log(m.k / 8.0);
  auto logf = [&](double t) {
    const double r = m.radius(t);
    return t - std::exp(t) - std::exp(m.log_volume((r + y1) * (r + y1) + s2));
  };
  // The volume term is smallest where r = -y1.
  const double t_min = y1 < 0.0 ? m.k * std::log(-y1) + m.log_vb : t_hi;
  return log_integrate(logf, t_hi - 40.0, t_hi, rel_tol, 16, {t_min}).log_value;
}

struct Proposal {
  double mu = 0.0;     // mean of y1
  double theta = 1.0;  // chi-square scale
};

// Mode of the joint integrand over (ln v, y1, c) by grid search.
Proposal find_proposal(const Reduction& m) {
  const double t_hi = std::log(m.k / 8.0);
  Proposal best;
  double best_val = kNegInf;
  double best_c = std::max(m.nu - 2.0, 1.0);
  for (int it = 0; it < 12; ++it) {
    const double t = t_hi - 0.5 * it;
    const double r = m.radius(t);
    for (int iy = 0; iy <= 240; ++iy) {
      const double y1 = m.sigma * (-kSigmaSpan + 0.25 * iy);
      for (int ic = 1; ic <= 120; ++ic) {
        const double c = std::max(m.nu, 1.0) * 1.5 * ic / 120.0;
        const double val = t - std::exp(t) - 0.5 * y1 * y1 / m.sigma2 +
                           (m.nu > 0.0 ? log_chi_square_pdf(c, m.nu) : 0.0) -
                           std::exp(m.log_volume((r + y1) * (r + y1) + m.sigma2 * c));
        if (val > best_val) {
          best_val = val;
          best.mu = y1;
          best_c = c;
        }
      }
    }
  }
  if (m.nu > 2.0) best.theta = std::clamp(best_c / (m.nu - 2.0), 0.05, 1.5);
  return best;
}

IntegralResult integral_monte_carlo(int k, double delta_sq, const IntegralOptions& opt) {
  const Reduction m(k, delta_sq);
  const Proposal prop = find_proposal(m);
  const std::uint64_t n = opt.mc_samples;
  if (n < 2) throw InvalidArgument("Monte Carlo needs at least 2 samples");
  const int dof = k - 1;
  std::vector<double> log_x(n);
  parallel_blocks(n, opt.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Stream rng(opt.seed, i);
      const double y1 = prop.mu + m.sigma * rng.normal();
      double sum_sq = 0.0;
      for (int j = 0; j < dof; ++j) {
        const double z = rng.normal();
        sum_sq += z * z;
      }
      const double c = prop.theta * sum_sq;
      // Density ratio target / proposal for y1 and for c.
      double log_w = (-0.5 * y1 * y1 + 0.5 * (y1 - prop.mu) * (y1 - prop.mu)) / m.sigma2;
      if (dof > 0)
        log_w += log_chi_square_pdf(c, m.nu) -
                 (log_chi_square_pdf(sum_sq, m.nu) - std::log(prop.theta));
      log_x[i] = log_w + log_q_given(m, y1, m.sigma2 * c, 1e-7);
    }
  });
  const double lse = log_sum_exp(log_x);
  std::vector<double> twice(n);
  for (std::size_t i = 0; i < n; ++i) twice[i] = 2.0 * log_x[i];
  const double lse2 = log_sum_exp(twice);
  const double log_n = std::log(static_cast<double>(n));
  IntegralResult res;
  res.k = k;
  res.delta_sq = delta_sq;
  res.method = Method::kMonteCarlo;
  res.samples = n;
  res.log_value = lse - log_n;
  if (lse != kNegInf) {
    const double rel_var = std::exp((lse2 - log_n) - 2.0 * (lse - log_n)) - 1.0;
    res.err_est = std::sqrt(std::max(rel_var, 0.0) / static_cast<double>(n));
  }
  return res;
}

double log_ball_p(const Reduction& m, double r, double rk2, double rel_tol) {
  const double lo = std::max(-kSigmaSpan * m.sigma, -r - std::sqrt(rk2));
  const double hi = std::min(kSigmaSpan * m.sigma, std::sqrt(rk2) - r);
  if (!(hi > lo)) return kNegInf;
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * m.sigma2);
  auto logf = [&](double y1) {
    const double room = rk2 - (r + y1) * (r + y1);
    if (room <= 0.0) return kNegInf;
    const double lf = m.nu > 0.0 ? log_gamma_p(0.5 * m.nu, 0.5 * room / m.sigma2) : 0.0;
    return log_norm - 0.5 * y1 * y1 / m.sigma2 + lf;
  };
  return log_integrate(logf, lo, hi, rel_tol, 64, {0.0, -r}).log_value;
}

IntegralResult ball_quadrature(int k, double delta, double rel_tol) {
  const Reduction m(k, delta * delta);
  const double rk = geometry::radius_for_volume(k, 1.0);
  const double rk2 = rk * rk;
  const double inner_tol = std::min(1e-8, rel_tol * 1e-2);
  // v = (r / r_k)^k is uniform on [0, 1]; integrate over t = ln v.
  auto logf = [&](double t) {
    const double lp = log_ball_p(m, rk * std::exp(t / k), rk2, inner_tol);
    return lp == kNegInf ? kNegInf : t + lp;
  };
  double t_lo = -40.0;
  LogQuad q;
  for (;;) {
    q = log_integrate(logf, t_lo, 0.0, rel_tol, 32);
    const double tail = logf(t_lo);
    if (q.log_value == kNegInf || tail - q.log_value < std::log(rel_tol * 1e-3) ||
        t_lo < -600.0)
      break;
    t_lo -= 40.0;
  }
  IntegralResult res;
  res.k = k;
  res.delta_sq = delta * delta;
  res.method = Method::kQuadrature;
  res.log_value = q.log_value;
  res.err_est = q.rel_err + inner_tol;
  return res;
}

IntegralResult ball_monte_carlo(int k, double delta, const IntegralOptions& opt) {
  const double rk = geometry::radius_for_volume(k, 1.0);
  const double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(k));
  const std::uint64_t hits = parallel_count(
      opt.mc_samples, opt.workers, [&](std::size_t begin, std::size_t end) {
        std::uint64_t h = 0;
        Vector dir(k);
        for (std::size_t i = begin; i < end; ++i) {
          Stream rng(opt.seed, i);
          for (int j = 0; j < k; ++j) dir(j) = rng.normal();
          const double radius = rk * std::pow(rng.uniform(), 1.0 / k);
          Vector p = dir * (radius / dir.norm());
          for (int j = 0; j < k; ++j) p(j) += delta * inv_sqrt_k * rng.normal();
          if (p.norm() <= rk) ++h;
        }
        return h;
      });
  const Estimate e = wilson(hits, opt.mc_samples);
  IntegralResult res;
  res.k = k;
  res.delta_sq = delta * delta;
  res.method = Method::kMonteCarlo;
  res.samples = opt.mc_samples;
  res.log_value = hits ? std::log(e.p_hat) : kNegInf;
  res.err_est = hits ? std::sqrt(e.p_hat * (1.0 - e.p_hat) / opt.mc_samples) / e.p_hat
                     : 1.0;
  return res;
}

void check_accuracy(const IntegralResult& r, const char* what) {
  if (!(r.err_est <= kMaxRelErr))
    throw AccuracyFailure(std::string(what) + ": relative error estimate " +
                              std::to_string(r.err_est) + " above 1e-3",
                          r.log_value, r.err_est);
}

}  // namespace

std::string to_string(Method m) {
  return m == Method::kQuadrature ? "quadrature" : "monte-carlo";
}

double IntegralResult::value() const { return std::exp(log_value); }

IntegralResult integral_i(int k, double delta_sq, Method method,
                          const IntegralOptions& opt) {
  if (k < 1) throw InvalidArgument("dimension must be >= 1");
  if (!(delta_sq > 0.0) || !std::isfinite(delta_sq))
    throw InvalidArgument("delta_sq must be positive");
  IntegralResult r = method == Method::kQuadrature
                         ? integral_quadrature(k, delta_sq, opt.rel_tol)
                         : integral_monte_carlo(k, delta_sq, opt);
  r.in_regime = delta_sq >= 1.0 && delta_sq <= k;
  if (method == Method::kQuadrature) check_accuracy(r, "integral_i");
  return r;
}

IntegralResult ball_q(int k, double delta, Method method, const IntegralOptions& opt) {
  if (k < 1) throw InvalidArgument("dimension must be >= 1");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw InvalidArgument("delta must be positive");
  IntegralResult r = method == Method::kQuadrature
                         ? ball_quadrature(k, delta, opt.rel_tol)
                         : ball_monte_carlo(k, delta, opt);
  if (method == Method::kQuadrature) check_accuracy(r, "ball_q");
  return r;
}

SandwichBounds sandwich_bounds(int k, double delta, const IntegralOptions& opt) {
  SandwichBounds b;
  const double d2 = delta * delta;
  b.i_delta = integral_i(k, d2, Method::kQuadrature, opt).value();
  b.i_shrunk = integral_i(k, std::pow(4.0, -2.0 / k) * d2, Method::kQuadrature, opt).value();
  b.lower = b.i_delta - std::exp(-k / 8.0);
  b.upper = 4.0 * b.i_shrunk + 3.0 * std::exp(-k / 8.0);
  return b;
}

SandwichReport check_sandwich(const std::vector<LatticePtr>& lattices, double delta,
                              std::uint64_t trials, std::uint64_t seed, int workers) {
  if (lattices.empty()) throw InvalidArgument("check_sandwich needs at least one lattice");
  const int k = lattices.front()->dim();
  for (const auto& l : lattices)
    if (l->dim() != k) throw InvalidArgument("all lattices must share dimension k");
  SandwichReport rep;
  rep.k = k;
  rep.delta = delta;
  rep.trials = trials;
  rep.seed = seed;
  for (std::size_t j = 0; j < lattices.size(); ++j) {
    const Decoder dec(lattices[j]);
    McOptions mo;
    mo.seed = seed + j;
    mo.workers = workers;
    rep.per_lattice.push_back(estimate_p(dec, delta, trials, mo).p_hat);
  }
  rep.mean = mean_stat(rep.per_lattice);
  rep.bounds = sandwich_bounds(k, delta);
  const double slack = 3.0 * rep.mean.stderr_;
  rep.pass = rep.mean.mean >= rep.bounds.lower - slack &&
             rep.mean.mean <= rep.bounds.upper + slack;
  rep.low_power = lattices.size() < 30;
  return rep;
}

bool jensen_holds(const std::vector<double>& p, double gamma) {
  if (p.empty()) throw InvalidArgument("jensen_holds needs estimates");
  if (!(gamma >= 1.0)) throw InvalidArgument("jensen_holds needs gamma >= 1");
  double mean = 0.0, mean_pow = 0.0;
  for (double x : p) {
    mean += x;
    mean_pow += std::pow(x, gamma);
  }
  mean /= static_cast<double>(p.size());
  mean_pow /= static_cast<double>(p.size());
  const double rhs = std::pow(mean, gamma);
  return mean_pow >= rhs * (1.0 - 1e-12);
}

double exponent_multiplier(int k, double beta) {
  const double sqrt_k = std::sqrt(static_cast<double>(k));
  const double tau = geometry::dimension_constants(k).tau;
  const IntegralResult r = integral_i(k, beta * sqrt_k, Method::kQuadrature);
  return -r.log_value * 8.0 / (tau * tau * sqrt_k);
}

ExponentReport check_exponents(int k, double c, double envelope) {
  const double sqrt_k = std::sqrt(static_cast<double>(k));
  if (!(c >= 1.0) || c * c > sqrt_k)
    throw InvalidArgument("check_exponents needs 1 <= c and c^2 <= sqrt(k)");
  ExponentReport rep;
  rep.k = k;
  rep.c = c;
  rep.envelope = envelope;
  rep.tau = geometry::dimension_constants(k).tau;
  const double beta_c = c * c;
  rep.multiplier_1 = exponent_multiplier(k, 1.0);
  rep.multiplier_c2 = beta_c == 1.0 ? rep.multiplier_1 : exponent_multiplier(k, beta_c);
  rep.deviation_1 = std::abs(rep.multiplier_1 - 1.0);
  rep.deviation_c2 = std::abs(rep.multiplier_c2 / beta_c - 1.0);
  rep.pass = rep.deviation_1 <= envelope / sqrt_k &&
             rep.deviation_c2 <= envelope * beta_c / sqrt_k;
  return rep;
}

SchmidtApReport check_schmidt_ap(int k, const SchmidtApOptions& opt) {
  if (k < 13) throw InvalidArgument("check_schmidt_ap needs k >= 13");
  if (opt.pairs < 1 || opt.lattices < 1) throw InvalidArgument("need pairs and lattices");
  if (!(opt.v_lo >= 0.0) || !(opt.v_hi > opt.v_lo))
    throw InvalidArgument("need 0 <= v_lo < v_hi");
  SchmidtApReport rep;
  rep.k = k;
  rep.lattices = opt.lattices;
  rep.seed = opt.seed;
  rep.v_lo = opt.v_lo;
  rep.v_hi = opt.v_hi;

  // Pair generation: x and z = x + y with independent uniform directions and
  // volumes uniform on [0, v_hi], kept when V_{x,y} falls in range.
  std::vector<Vector> xs, zs;
  std::vector<double> vols;
  Stream pair_rng(opt.seed ^ 0x5ca1ab1e5eedULL, 0);
  auto direction = [&] {
    Vector d(k);
    for (int i = 0; i < k; ++i) d(i) = pair_rng.normal();
    return Vector(d / d.norm());
  };
  long attempts = 0;
  while (static_cast<int>(xs.size()) < opt.pairs) {
    if (++attempts > 10'000'000) throw InvalidArgument("could not draw pairs in range");
    const double r1 = geometry::radius_for_volume(k, opt.v_hi * pair_rng.uniform());
    const double r2 = geometry::radius_for_volume(k, opt.v_hi * pair_rng.uniform());
    const Vector x = r1 * direction();
    const Vector z = r2 * direction();
    if ((x + z).norm() < 1e-9) continue;  // antipodal
    const double v = geometry::union_volume(k, r1, r2, (z - x).norm());
    if (v < opt.v_lo || v > opt.v_hi) continue;
    xs.push_back(x);
    zs.push_back(z);
    vols.push_back(v);
  }

  GmParams gp;
  gp.k = k;
  gp.p = opt.p ? opt.p : kDefaultModulus;
  gp.seed = opt.seed;
  const std::size_t np = xs.size();
  std::vector<std::atomic<std::uint64_t>> inside(np);
  parallel_blocks(opt.lattices, opt.workers, [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint64_t> local(np, 0);
    for (std::size_t j = begin; j < end; ++j) {
      const LatticePtr l = sample_gm(gp, j);
      for (std::size_t i = 0; i < np; ++i) {
        if (in_voronoi_enum(*l, xs[i]) && in_voronoi_enum(*l, zs[i]))
          ++local[i];
      }
    }
    for (std::size_t i = 0; i < np; ++i) inside[i] += local[i];
  });

  const double slack_term = std::exp(-k / 4.0);
  int passed = 0;
  for (std::size_t i = 0; i < np; ++i) {
    SchmidtPair p;
    p.v_union = vols[i];
    p.lower = std::exp(-vols[i]) - slack_term;
    p.upper = std::exp(-0.5 * vols[i]) + slack_term;
    p.estimate = wilson(inside[i].load(), opt.lattices);
    const double sd = std::sqrt(p.estimate.p_hat * (1.0 - p.estimate.p_hat) /
                                static_cast<double>(opt.lattices));
    p.pass = p.estimate.p_hat >= p.lower - 3.0 * sd && p.estimate.p_hat <= p.upper + 3.0 * sd;
    passed += p.pass;
    rep.pairs.push_back(p);
  }
  rep.pass_fraction = static_cast<double>(passed) / static_cast<double>(np);
  rep.pass = rep.pass_fraction >= 0.95;
  return rep;
}

}  // namespace llsh::analysis
