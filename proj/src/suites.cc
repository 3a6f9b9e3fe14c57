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

#include "llsh/suites.h"

#include <cmath>

#include "llsh/analysis.h"
#include "llsh/geometry.h"
#include "llsh/randlat.h"

namespace llsh::suites {
namespace {

using report::Json;

// Smallest prime >= 2^32. At k = 8 the ensemble mean of the point count is
// the Z^8 count in a ball of radius ~p^(1/8) divided by p; with p near 2^20
// that is 5-10% below the volume, with p near 2^32 it is within 1%.
constexpr std::uint64_t kSiegelModulus = 4294967311ULL;

template <typename T>
T pick(T value, T fallback) {
  return value != T{} ? value : fallback;
}

GmParams gm(const SuiteOptions& opt, int k) {
  GmParams p;
  p.k = k;
  p.p = pick<std::uint64_t>(opt.p, kDefaultModulus);
  p.seed = opt.seed;
  return p;
}

Json common(const SuiteOptions& opt, int k, std::uint64_t lattices) {
  return Json{{"k", k}, {"seed", opt.seed}, {"lattices", lattices},
              {"modulus", pick<std::uint64_t>(opt.p, kDefaultModulus)}};
}

SuiteResult siegel(SuiteOptions opt) {
  opt.p = pick<std::uint64_t>(opt.p, kSiegelModulus);
  const int k = pick(opt.k, 8);
  const std::uint64_t lattices = pick<std::uint64_t>(opt.lattices, 2000);
  SuiteResult res{"siegel", true, common(opt, k, lattices)};
  Json rows = Json::array();
  for (double v : {0.5, 1.0, 2.0, 4.0}) {
    const std::vector<double> counts = siegel_counts(gm(opt, k), v, lattices, opt.workers);
    const MeanStat m = mean_stat(counts);
    const bool ok = std::abs(m.mean - v) <= 3.0 * m.stderr_;
    res.pass = res.pass && ok;
    rows.push_back(Json{{"volume", v}, {"mean", m.mean}, {"stderr", m.stderr_}, {"pass", ok}});
  }
  res.report["volumes"] = rows;
  res.report["pass"] = res.pass;
  return res;
}

SuiteResult schmidt(const SuiteOptions& opt) {
  const int k = pick(opt.k, 12);
  const std::uint64_t lattices = pick<std::uint64_t>(opt.lattices, 2000);
  SuiteResult res{"schmidt", true, common(opt, k, lattices)};
  Json rows = Json::array();
  for (double v : {0.5, 1.0, 2.0}) {
    Region region;
    Ball b;
    b.radius = geometry::radius_for_volume(k, v);
    b.center = Vector::Zero(k);
    b.center(0) = 2.0 * b.radius;
    region.balls.push_back(b);
    const Estimate e = empty_probability(gm(opt, k), region, lattices, opt.workers);
    const double target = std::exp(-v);
    const bool ok = std::abs(e.p_hat - target) <= 0.02 + 3.0 * e.ci_half;
    res.pass = res.pass && ok;
    rows.push_back(Json{{"volume", v}, {"target", target}, {"estimate", report::to_json(e)}, {"pass", ok}});
  }
  res.report["volumes"] = rows;
  res.report["pass"] = res.pass;
  return res;
}

SuiteResult rogers(const SuiteOptions& opt) {
  const int k = pick(opt.k, 12);
  const std::uint64_t lattices = pick<std::uint64_t>(opt.lattices, 50);
  const std::uint64_t samples = pick<std::uint64_t>(opt.trials, 100000);
  SuiteResult res{"rogers", false, common(opt, k, lattices)};
  std::vector<double> fractions(lattices);
  parallel_blocks(lattices, opt.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const Decoder dec(sample_gm(gm(opt, k), j));
      fractions[j] = rogers_tail_fraction(dec, samples, opt.seed + j);
    }
  });
  const MeanStat m = mean_stat(fractions);
  const double bound = 4.0 * std::exp(-k / 8.0);
  res.pass = m.mean <= bound;
  res.report["samples"] = samples;
  res.report["mean_fraction"] = m.mean;
  res.report["stderr"] = m.stderr_;
  res.report["bound"] = bound;
  res.report["pass"] = res.pass;
  return res;
}

SuiteResult sandwich(const SuiteOptions& opt) {
  const int k = pick(opt.k, 16);
  const std::uint64_t lattices = pick<std::uint64_t>(opt.lattices, 200);
  const std::uint64_t trials = pick<std::uint64_t>(opt.trials, 10000);
  const double delta = pick(opt.delta, std::pow(static_cast<double>(k), 0.25));
  std::vector<LatticePtr> ls;
  for (std::uint64_t j = 0; j < lattices; ++j) ls.push_back(sample_gm(gm(opt, k), j));
  const analysis::SandwichReport rep =
      analysis::check_sandwich(ls, delta, trials, opt.seed, opt.workers);
  SuiteResult res{"sandwich", rep.pass, report::to_json(rep)};
  Json jensen = Json::array();
  for (double g : {1.0, 2.25, 4.0}) {
    const bool ok = analysis::jensen_holds(rep.per_lattice, g);
    res.pass = res.pass && ok;
    jensen.push_back(Json{{"gamma", g}, {"pass", ok}});
  }
  res.report["modulus"] = pick<std::uint64_t>(opt.p, kDefaultModulus);
  res.report["jensen"] = jensen;
  res.report["pass"] = res.pass;
  return res;
}

SuiteResult schmidt_ap(const SuiteOptions& opt) {
  analysis::SchmidtApOptions o;
  o.lattices = pick<std::uint64_t>(opt.lattices, o.lattices);
  if (opt.trials) o.pairs = static_cast<int>(opt.trials);
  o.p = opt.p;
  o.seed = opt.seed;
  o.workers = opt.workers;
  const analysis::SchmidtApReport rep = analysis::check_schmidt_ap(pick(opt.k, 13), o);
  return {"schmidt-ap", rep.pass, report::to_json(rep)};
}

SuiteResult exponents(const SuiteOptions& opt) {
  const analysis::ExponentReport rep = analysis::check_exponents(
      pick(opt.k, 64), pick(opt.c, 2.0), pick(opt.envelope, analysis::kDefaultEnvelope));
  return {"exponents", rep.pass, report::to_json(rep)};
}

}  // namespace

const std::vector<std::string>& names() {
  static const std::vector<std::string> kNames{"siegel",   "schmidt",    "rogers",
                                               "sandwich", "schmidt-ap", "exponents"};
  return kNames;
}

SuiteResult run(const std::string& name, const SuiteOptions& opt) {
  if (name == "siegel") return siegel(opt);
  if (name == "schmidt") return schmidt(opt);
  if (name == "rogers") return rogers(opt);
  if (name == "sandwich") return sandwich(opt);
  if (name == "schmidt-ap") return schmidt_ap(opt);
  if (name == "exponents") return exponents(opt);
  throw UnknownSuite("unknown suite '" + name + "'");
}

}  // namespace llsh::suites
