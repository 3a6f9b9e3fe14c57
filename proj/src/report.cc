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

#include "llsh/report.h"

#include <cmath>
#include <ctime>
#include <fstream>

#include "llsh/errors.h"

#ifndef LLSH_VERSION
#define LLSH_VERSION "unknown"
#endif

namespace llsh::report {
namespace {

// JSON has no NaN or infinity; those become null.
Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json nums(const std::vector<double>& xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(num(x));
  return out;
}

}  // namespace

std::string version() { return LLSH_VERSION; }

Json to_json(const Estimate& e) {
  return Json{{"successes", e.successes}, {"trials", e.trials},   {"p_hat", num(e.p_hat)},
              {"ci_low", num(e.ci_low)},  {"ci_high", num(e.ci_high)}, {"ci_half", num(e.ci_half)},
              {"failures", e.failures}};
}

Json to_json(const MeanStat& m) {
  return Json{{"mean", num(m.mean)}, {"stddev", num(m.stddev)}, {"stderr", num(m.stderr_)}, {"n", m.n}};
}

Json to_json(const analysis::IntegralResult& r) {
  return Json{{"k", r.k},
              {"delta_sq", num(r.delta_sq)},
              {"method", analysis::to_string(r.method)},
              {"log_value", num(r.log_value)},
              {"value", num(r.value())},
              {"rel_err", num(r.err_est)},
              {"samples", r.samples},
              {"in_regime", r.in_regime}};
}

Json to_json(const analysis::SandwichBounds& b) {
  return Json{{"lower", num(b.lower)}, {"upper", num(b.upper)}, {"i_delta", num(b.i_delta)},
              {"i_shrunk", num(b.i_shrunk)}};
}

Json to_json(const analysis::SandwichReport& r) {
  return Json{{"k", r.k},
              {"delta", num(r.delta)},
              {"trials", r.trials},
              {"seed", r.seed},
              {"lattices", r.per_lattice.size()},
              {"mean", to_json(r.mean)},
              {"bounds", to_json(r.bounds)},
              {"per_lattice", nums(r.per_lattice)},
              {"low_power", r.low_power},
              {"pass", r.pass}};
}

Json to_json(const analysis::ExponentReport& r) {
  return Json{{"k", r.k},
              {"c", num(r.c)},
              {"envelope", num(r.envelope)},
              {"tau", num(r.tau)},
              {"multiplier_1", num(r.multiplier_1)},
              {"multiplier_c2", num(r.multiplier_c2)},
              {"deviation_1", num(r.deviation_1)},
              {"deviation_c2", num(r.deviation_c2)},
              {"pass", r.pass}};
}

Json to_json(const analysis::SchmidtApReport& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairs)
    pairs.push_back(Json{{"v_union", num(p.v_union)},
                         {"lower", num(p.lower)},
                         {"upper", num(p.upper)},
                         {"estimate", to_json(p.estimate)},
                         {"pass", p.pass}});
  return Json{{"k", r.k},         {"lattices", r.lattices},
              {"seed", r.seed},   {"v_lo", num(r.v_lo)},
              {"v_hi", num(r.v_hi)}, {"pass_fraction", num(r.pass_fraction)},
              {"pass", r.pass},   {"pairs", pairs}};
}

Json to_json(const CollisionCurve& c) {
  Json succ = Json::array();
  for (auto s : c.successes) succ.push_back(s);
  return Json{{"k", c.k},
              {"lattice", c.lattice_id},
              {"trials", c.trials},
              {"failures", c.failures},
              {"deltas", nums(c.deltas)},
              {"p_hat", nums(c.p_hat)},
              {"ci_half", nums(c.ci_half)},
              {"successes", succ}};
}

Json to_json(const RhoEstimate& r) {
  return Json{{"rho", num(r.rho)},
              {"argmin_delta", num(r.argmin_delta)},
              {"c", num(r.c)},
              {"usable_points", r.usable_points}};
}

Json to_json(const ann::AnnConfig& c) {
  return Json{{"n", c.n},           {"d", c.d},     {"c", num(c.c)},
              {"r", num(c.r)},      {"k", c.k},     {"m", c.m},
              {"tables", c.tables}, {"scale", num(c.scale)},
              {"budget", c.budget ? c.budget : 3ULL * c.tables},
              {"seed", c.seed}};
}

Json to_json(const ann::OperatingPoint& op) {
  return Json{{"delta", num(op.delta)}, {"p1", num(op.p1)}, {"p2", num(op.p2)}, {"rho", num(op.rho)}};
}

Json envelope(const std::string& tool, std::uint64_t seed, Json config, Json result) {
  return Json{{"tool", tool},
              {"version", version()},
              {"seed", seed},
              {"config", std::move(config)},
              {"result", std::move(result)}};
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed for " + path);
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_timing(const std::string& path, const std::string& started_utc, double seconds,
                  const Json& extra) {
  Json j{{"started_utc", started_utc}, {"wall_seconds", seconds}};
  for (const auto& [key, value] : extra.items()) j[key] = value;
  j["version"] = version();
  write_json(path + ".timing.json", j);
}

}  // namespace llsh::report
