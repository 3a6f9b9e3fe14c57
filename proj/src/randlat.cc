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

#include "llsh/randlat.h"

#include <cmath>
#include <string>

#include "llsh/cvp.h"
#include "llsh/errors.h"
#include "llsh/geometry.h"
#include "llsh/lshcore.h"

namespace llsh {
namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, b, m);
    b = mul_mod(b, b, m);
    e >>= 1;
  }
  return r;
}

constexpr std::uint64_t kMinModulus = 1ULL << 16;
constexpr double kMaxCountVolume = 1e6;

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL,
                          29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These witnesses decide primality for every n < 3.3e24.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL,
                          29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t next_prime(std::uint64_t n) {
  while (!is_prime(n)) ++n;
  return n;
}

Matrix gm_basis(int k, std::uint64_t p, Stream& rng) {
  if (k < 1) throw InvalidArgument("dimension must be >= 1");
  if (p < kMinModulus) throw InvalidArgument("ensemble modulus must be >= 2^16");
  if (!is_prime(p)) throw InvalidArgument("ensemble modulus " + std::to_string(p) + " is not prime");
  Matrix b = Matrix::Identity(k, k);
  b(0, 0) = static_cast<double>(p);
  for (int i = 1; i < k; ++i) b(0, i) = static_cast<double>(rng.below(p));
  return b;
}

LatticePtr sample_gm(const GmParams& params, Stream& rng) {
  Matrix b = gm_basis(params.k, params.p, rng);
  return normalize_det(Basis(std::move(b)), Structure::kGeneral,
                       "gm:" + std::to_string(params.p));
}

LatticePtr sample_gm(const GmParams& params, std::uint64_t index) {
  Stream rng(params.seed, index);
  return sample_gm(params, rng);
}

std::uint64_t count_points(const Lattice& l, double radius) {
  if (!(radius >= 0.0)) throw InvalidArgument("radius must be >= 0");
  if (radius == 0.0) return 0;
  if (geometry::ball_volume(l.dim(), radius) > kMaxCountVolume)
    throw InvalidArgument("count_points: ball volume exceeds 10^6");
  return enumerate_ball_count(l, radius);
}

int Region::dim() const {
  return balls.empty() ? 0 : static_cast<int>(balls.front().center.size());
}

double Region::volume() const {
  if (balls.empty()) return 0.0;
  const int k = dim();
  if (balls.size() == 1) return geometry::ball_volume(k, balls[0].radius);
  if (balls.size() == 2) {
    const double d = (balls[0].center - balls[1].center).norm();
    return geometry::union_volume(k, balls[0].radius, balls[1].radius, d);
  }
  throw InvalidArgument("regions hold one or two balls");
}

bool Region::contains_origin() const {
  for (const auto& b : balls)
    if (b.center.norm() < b.radius) return true;
  return false;
}

bool Region::hit_by(const Lattice& l) const {
  for (const auto& b : balls) {
    if (b.radius <= 0.0) continue;
    if (decode_enum(l, b.center).dist < b.radius) return true;
  }
  return false;
}

Estimate empty_probability(const GmParams& params, const Region& region,
                           std::uint64_t trials, int workers) {
  if (trials == 0) throw InvalidArgument("trials must be positive");
  if (region.balls.size() > 2) throw InvalidArgument("regions hold one or two balls");
  for (const auto& b : region.balls) {
    if (b.center.size() != params.k)
      throw InvalidArgument("region dimension does not match k");
    if (!(b.radius >= 0.0)) throw InvalidArgument("ball radius must be >= 0");
  }
  if (region.contains_origin())
    throw InvalidArgument("region contains the origin");
  const std::uint64_t empty = parallel_count(
      trials, workers, [&](std::size_t begin, std::size_t end) {
        std::uint64_t n = 0;
        for (std::size_t t = begin; t < end; ++t) {
          const LatticePtr l = sample_gm(params, t);
          if (!region.hit_by(*l)) ++n;
        }
        return n;
      });
  return wilson(empty, trials);
}

std::vector<double> siegel_counts(const GmParams& params, double volume,
                                  std::uint64_t lattices, int workers) {
  const double radius = geometry::radius_for_volume(params.k, volume);
  std::vector<double> counts(lattices);
  parallel_blocks(lattices, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t)
      counts[t] = static_cast<double>(count_points(*sample_gm(params, t), radius));
  });
  return counts;
}

double rogers_tail_fraction(const Decoder& dec, std::uint64_t samples,
                            std::uint64_t seed) {
  if (samples == 0) throw InvalidArgument("samples must be positive");
  const int k = dec.lattice().dim();
  const double log_cut = std::log(k / 8.0);
  const double log_vb = geometry::log_unit_ball_volume(k);
  std::uint64_t tail = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    Stream rng(seed, s);
    const Vector x = sample_voronoi(dec, rng);
    if (log_vb + k * std::log(x.norm()) > log_cut) ++tail;
  }
  return static_cast<double>(tail) / static_cast<double>(samples);
}

}  // namespace llsh
