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

#ifndef LLSH_NUMERIC_H_
#define LLSH_NUMERIC_H_

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace llsh {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log(exp(a) - exp(b)) for a >= b.
inline double log_sub(double a, double b) {
  if (b == kNegInf) return a;
  return a + std::log(-std::expm1(b - a));
}

double log_sum_exp(std::span<const double> xs);

// Regularized incomplete beta I_x(a, b), evaluated by a modified-Lentz
// continued fraction. Absolute error <= 1e-12 for a, b > 0, x in [0, 1].
double incomplete_beta(double a, double b, double x);

// log P(a, x), the regularized lower incomplete gamma function, accurate in
// the far lower tail (no underflow).
double log_gamma_p(double a, double x);

// log density of the chi-square distribution with nu degrees of freedom.
inline double log_chi_square_pdf(double c, double nu) {
  if (c <= 0.0) return nu == 2.0 && c == 0.0 ? std::log(0.5) : kNegInf;
  return (0.5 * nu - 1.0) * std::log(c) - 0.5 * c - 0.5 * nu * std::log(2.0) -
         std::lgamma(0.5 * nu);
}

// Standard normal CDF and density.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double normal_pdf(double x) {
  return 0.3989422804014327 * std::exp(-0.5 * x * x);
}

struct QuadOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int max_intervals = 2000;
};

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

template <typename F>
Segment kronrod15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kr = fc * kKronrodWeights[7];
  double ga = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    const double fsum = f(c - dx) + f(c + dx);
    kr += kKronrodWeights[j] * fsum;
    if (j % 2 == 1) ga += kGaussWeights[j / 2] * fsum;
  }
  return {a, b, kr * h, std::abs((kr - ga) * h)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (G7/K15) quadrature over [a, b], with the
// initial partition taken from `breaks` (sorted, inside (a, b)). The interval
// with the largest error estimate is bisected until
// err <= max(abs_tol, rel_tol * |value|) or max_intervals is reached.
template <typename F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {},
                     std::span<const double> breaks = {}) {
  QuadResult res;
  if (!(b > a)) {
    res.converged = true;
    return res;
  }
  std::vector<double> cuts{a};
  for (double x : breaks)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Segment> heap;
  double total = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto s = detail::kronrod15(f, cuts[i], cuts[i + 1]);
    total += s.value;
    err += s.err;
    heap.push(s);
  }
  int intervals = static_cast<int>(heap.size());
  while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) &&
         intervals < opt.max_intervals) {
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;  // interval below floating-point resolution
    }
    const auto left = detail::kronrod15(f, worst.a, mid);
    const auto right = detail::kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum to shed drift from the incremental updates.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().err;
    heap.pop();
  }
  res.value = total;
  res.abs_err = err;
  res.evaluations = 15 * (intervals * 2 - 1);
  res.converged = err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
  return res;
}

}  // namespace llsh

#endif  // LLSH_NUMERIC_H_
