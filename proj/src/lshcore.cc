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

#include "llsh/lshcore.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "llsh/numeric.h"

namespace llsh {
namespace {

constexpr double kMaxFailureRate = 1e-3;

void check_failures(std::uint64_t failures, std::uint64_t trials) {
  if (static_cast<double>(failures) > kMaxFailureRate * static_cast<double>(trials))
    throw EstimationFailed(std::to_string(failures) + " of " + std::to_string(trials) +
                           " trials hit decoder failures");
}

}  // namespace

Vector sample_voronoi(const Decoder& decoder, Stream& rng) {
  const Vector u = sample_fundamental(decoder.lattice(), rng);
  return u - decoder.decode(u).vector;
}

HashFunction::HashFunction(Matrix projection, Vector shift, Decoder decoder)
    : projection_(std::move(projection)),
      shift_(std::move(shift)),
      decoder_(std::move(decoder)) {
  if (projection_.rows() != decoder_.lattice().dim() ||
      shift_.size() != decoder_.lattice().dim())
    throw InvalidArgument("hash function shape does not match the lattice");
}

HashFunction HashFunction::draw(const Decoder& decoder, int input_dim, Stream& rng) {
  if (input_dim < 1) throw InvalidArgument("input dimension must be >= 1");
  const int k = decoder.lattice().dim();
  const double sd = 1.0 / std::sqrt(static_cast<double>(k));
  Matrix m(k, input_dim);
  for (int j = 0; j < input_dim; ++j)
    for (int i = 0; i < k; ++i) m(i, j) = sd * rng.normal();
  Vector t = sample_fundamental(decoder.lattice(), rng);
  return HashFunction(std::move(m), std::move(t), decoder);
}

Coeffs HashFunction::operator()(const Vector& a) const {
  if (a.size() != projection_.cols())
    throw InvalidArgument("hash input has the wrong dimension");
  return decoder_.decode(projection_ * a + shift_).coeffs;
}

CollisionCurve estimate_curve(const Decoder& decoder, const std::vector<double>& grid,
                              std::uint64_t trials, const McOptions& opt) {
  if (grid.empty()) throw InvalidArgument("delta grid is empty");
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!(grid[j] >= 0.0) || !std::isfinite(grid[j]))
      throw InvalidArgument("delta grid values must be finite and >= 0");
    if (j > 0 && !(grid[j] > grid[j - 1]))
      throw InvalidArgument("delta grid must be strictly increasing");
  }
  if (trials == 0) throw InvalidArgument("trials must be positive");
  const int k = decoder.lattice().dim();
  const double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(k));
  const std::size_t g = grid.size();

  std::vector<std::atomic<std::uint64_t>> hits(g);
  std::atomic<std::uint64_t> failures{0};
  parallel_blocks(trials, opt.workers, [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint64_t> local(g, 0);
    std::uint64_t local_fail = 0;
    Vector dir(k);
    for (std::size_t t = begin; t < end; ++t) {
      Stream rng(opt.seed, t);
      try {
        const Vector x = sample_voronoi(decoder, rng);
        for (int i = 0; i < k; ++i) dir(i) = rng.normal() * inv_sqrt_k;
        for (std::size_t j = 0; j < g; ++j) {
          if (decoder.in_cell(x + grid[j] * dir)) ++local[j];
        }
      } catch (const BudgetExceeded&) {
        ++local_fail;
      }
    }
    for (std::size_t j = 0; j < g; ++j) hits[j] += local[j];
    failures += local_fail;
  });

  CollisionCurve curve;
  curve.k = k;
  curve.lattice_id = decoder.lattice().id();
  curve.trials = trials;
  curve.failures = failures.load();
  check_failures(curve.failures, trials);
  const std::uint64_t effective = trials - curve.failures;
  for (std::size_t j = 0; j < g; ++j) {
    const Estimate e = wilson(hits[j].load(), effective);
    curve.deltas.push_back(grid[j]);
    curve.p_hat.push_back(e.p_hat);
    curve.ci_half.push_back(e.ci_half);
    curve.successes.push_back(e.successes);
  }
  return curve;
}

Estimate estimate_p(const Decoder& decoder, double delta, std::uint64_t trials,
                    const McOptions& opt) {
  if (trials < 100) throw InvalidArgument("estimate_p needs at least 100 trials");
  const CollisionCurve c = estimate_curve(decoder, {delta}, trials, opt);
  Estimate e = wilson(c.successes[0], trials - c.failures);
  e.failures = c.failures;
  return e;
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2)
    throw InvalidArgument("geometric grid needs 0 < lo < hi and >= 2 points");
  std::vector<double> g(points);
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) g[i] = lo * std::exp(step * i);
  g.back() = hi;
  return g;
}

std::vector<double> default_grid(int k, double c, int points) {
  if (k < 1) throw InvalidArgument("dimension must be >= 1");
  const double center = std::pow(static_cast<double>(k), 0.25);
  return geometric_grid(0.25 * center, 4.0 * c * center, points);
}

RhoEstimate estimate_rho(const CollisionCurve& curve, double c) {
  if (!(c >= 1.0)) throw InvalidArgument("approximation factor c must be >= 1");
  const auto& d = curve.deltas;
  const auto& p = curve.p_hat;
  const std::size_t n = d.size();
  auto inside = [&](std::size_t i) { return p[i] > 0.0 && p[i] < 1.0; };

  RhoEstimate best;
  best.c = c;
  best.rho = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (!inside(i)) continue;
    const double target = c * d[i];
    if (target > d.back()) break;
    // Bracket c * delta on the grid.
    std::size_t j = i;
    while (j + 1 < n && d[j + 1] <= target) ++j;
    double log_p_far;
    if (d[j] == target) {
      if (!inside(j)) continue;
      log_p_far = std::log(p[j]);
    } else {
      if (j + 1 >= n || !inside(j) || !inside(j + 1)) continue;
      const double w = std::log(target / d[j]) / std::log(d[j + 1] / d[j]);
      log_p_far = (1.0 - w) * std::log(p[j]) + w * std::log(p[j + 1]);
    }
    const double ratio = std::log(p[i]) / log_p_far;
    ++best.usable_points;
    if (ratio < best.rho) {
      best.rho = ratio;
      best.argmin_delta = d[i];
    }
  }
  if (best.usable_points == 0)
    throw InsufficientData("no grid point has usable estimates at delta and c*delta");
  return best;
}

double zk_collision_probability(int k, double delta) {
  if (k < 1) throw InvalidArgument("dimension must be >= 1");
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be >= 0");
  if (delta == 0.0) return 1.0;
  const double s = delta / std::sqrt(static_cast<double>(k));
  // E[(1 - |y|)_+] for y ~ N(0, s^2).
  const double p1 =
      2.0 * ((normal_cdf(1.0 / s) - 0.5) - s * (normal_pdf(0.0) - normal_pdf(1.0 / s)));
  return std::pow(p1, k);
}

CollisionCurve zk_oracle_curve(int k, const std::vector<double>& grid) {
  CollisionCurve c;
  c.k = k;
  c.lattice_id = "zk-oracle";
  for (double d : grid) {
    c.deltas.push_back(d);
    c.p_hat.push_back(zk_collision_probability(k, d));
    c.ci_half.push_back(0.0);
    c.successes.push_back(0);
  }
  return c;
}

void write_curve_csv(std::ostream& out, const CollisionCurve& curve, bool failed) {
  out << "delta,p_hat,ci_half,trials" << (failed ? ",failed" : "") << '\n';
  char buf[96];
  for (std::size_t i = 0; i < curve.deltas.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%llu", curve.deltas[i],
                  curve.p_hat[i], curve.ci_half[i],
                  static_cast<unsigned long long>(curve.trials));
    out << buf << (failed ? ",1" : "") << '\n';
  }
}

}  // namespace llsh
