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

#ifndef LLSH_LSHCORE_H_
#define LLSH_LSHCORE_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "llsh/cvp.h"
#include "llsh/lattice.h"
#include "llsh/random.h"
#include "llsh/stats.h"

namespace llsh {

// Uniform point of the Voronoi cell around the origin: u - CV(u) for u
// uniform over a fundamental domain.
Vector sample_voronoi(const Decoder& decoder, Stream& rng);

// One draw h(a) = CV(M a + t) from the lattice hash family: M has i.i.d.
// N(0, 1/k) entries and t is uniform modulo the lattice.
class HashFunction {
 public:
  HashFunction(Matrix projection, Vector shift, Decoder decoder);

  static HashFunction draw(const Decoder& decoder, int input_dim, Stream& rng);

  Coeffs operator()(const Vector& a) const;

  int input_dim() const { return static_cast<int>(projection_.cols()); }
  const Matrix& projection() const { return projection_; }
  const Vector& shift() const { return shift_; }
  const Decoder& decoder() const { return decoder_; }

 private:
  Matrix projection_;
  Vector shift_;
  Decoder decoder_;
};

struct McOptions {
  std::uint64_t seed = 1;
  int workers = 1;
};

// Monte Carlo estimate of the collision probability p_delta through the
// Voronoi formulation: x uniform in the cell, y ~ N(0, delta^2/k I), success
// iff x + y decodes to the origin. Trial i draws from Stream(seed, i).
// Throws EstimationFailed when more than 0.1% of trials hit decoder budget
// failures.
Estimate estimate_p(const Decoder& decoder, double delta, std::uint64_t trials,
                    const McOptions& opt = {});

struct CollisionCurve {
  std::vector<double> deltas;
  std::vector<double> p_hat;
  std::vector<double> ci_half;
  std::vector<std::uint64_t> successes;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  int k = 0;
  std::string lattice_id;
};

// Estimates every grid point from the same trials: trial i draws x and the
// Gaussian direction g once, and grid point j uses y = delta_j / sqrt(k) * g.
// Each grid point therefore equals estimate_p at that delta with the same seed.
CollisionCurve estimate_curve(const Decoder& decoder, const std::vector<double>& grid,
                              std::uint64_t trials, const McOptions& opt = {});

// Geometric grid from k^(1/4)/4 to 4 c k^(1/4).
std::vector<double> default_grid(int k, double c, int points = 17);
std::vector<double> geometric_grid(double lo, double hi, int points);

struct RhoEstimate {
  double rho = 1.0;
  double argmin_delta = 0.0;
  double c = 1.0;
  std::size_t usable_points = 0;
};

// min over grid deltas of ln(1/p(delta)) / ln(1/p(c delta)); p at c*delta is
// log-linearly interpolated (ln p against ln delta) between neighbouring grid
// points. Points with p_hat in {0, 1} are skipped.
RhoEstimate estimate_rho(const CollisionCurve& curve, double c);

// Closed-form collision probability of Z^k: p1(delta / sqrt(k))^k with
// p1(s) = 2 [Phi(1/s) - 1/2 - s (phi(0) - phi(1/s))].
double zk_collision_probability(int k, double delta);
CollisionCurve zk_oracle_curve(int k, const std::vector<double>& grid);

// CSV: header "delta,p_hat,ci_half,trials" (plus ",failed" when
// `failed` is set), one row per grid point, %.17g reals.
void write_curve_csv(std::ostream& out, const CollisionCurve& curve,
                     bool failed = false);

}  // namespace llsh

#endif  // LLSH_LSHCORE_H_
