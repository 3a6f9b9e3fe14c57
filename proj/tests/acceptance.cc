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

// Acceptance run: one PASS/FAIL line per criterion, all tolerances fixed
// below. Usage: acceptance --cli <path to llsh> [--only 1,5,13] [--scratch dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "llsh/analysis.h"
#include "llsh/ann.h"
#include "llsh/cvp.h"
#include "llsh/geometry.h"
#include "llsh/lattice.h"
#include "llsh/lshcore.h"
#include "llsh/randlat.h"
#include "llsh/random.h"
#include "llsh/stats.h"

namespace fs = std::filesystem;
using namespace llsh;

namespace {

// Envelope constant for the exponent multiplier check, frozen after the
// sweep recorded in docs/calibration.md.
constexpr double kCalibratedEnvelope = 1.0;
// Siegel runs use a modulus near 2^32; see docs/calibration.md for the
// discretization bias at 2^20.
constexpr std::uint64_t kSiegelModulus = 4294967311ULL;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------------------

Outcome enum_vs_brute() {
  Clock clock;
  double worst = 0.0;
  int targets = 0;
  for (int j = 0; j < 20; ++j) {
    const int k = 4 + j % 3;
    Stream rng(101, static_cast<std::uint64_t>(j));
    Matrix b(k, k);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) b(r, c) = rng.normal();
    const LatticePtr l = normalize_det(Basis(b));
    for (int t = 0; t < 50; ++t, ++targets) {
      Vector x(k);
      for (int i = 0; i < k; ++i) x(i) = 3.0 * rng.normal();
      const double de = decode_enum(*l, x).dist;
      const double db = decode_brute(*l, x, 3).dist;
      worst = std::max(worst, std::abs(de - db));
    }
  }
  const double s = clock.seconds();
  return {worst <= 1e-9 && targets == 1000 && s <= 60,
          std::to_string(targets) + " targets, max |d_enum - d_brute| = " + fmt("%.2e", worst) +
              " (tol 1e-9), " + fmt("%.1f s", s) + " (limit 60 s)"};
}

Outcome structured_vs_enum() {
  Clock clock;
  struct Case {
    const char* name;
    LatticePtr lattice;
    DecoderKind kind;
  };
  const std::vector<Case> cases{{"zk", zk_lattice(6), DecoderKind::kZk},
                                {"dk", dk_lattice(6), DecoderKind::kDk},
                                {"e8", e8_lattice(), DecoderKind::kE8}};
  std::string detail;
  bool ok = true;
  for (const Case& c : cases) {
    const Decoder fast(c.lattice, c.kind);
    const Decoder slow(c.lattice, DecoderKind::kEnum);
    const int k = c.lattice->dim();
    Stream rng(202, static_cast<std::uint64_t>(k));
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
      Vector x(k);
      for (int i = 0; i < k; ++i) x(i) = 4.0 * rng.normal();
      const double a = fast.decode(x).dist;
      const double b = slow.decode(x).dist;
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, b));
    }
    ok = ok && worst <= 1e-12;
    detail += std::string(c.name) + " max rel diff " + fmt("%.1e", worst) + "; ";
  }
  const double s = clock.seconds();
  return {ok && s <= 60, detail + "1e4 targets each (tol 1e-12), " + fmt("%.1f s", s) +
                             " (limit 60 s)"};
}

Outcome siegel() {
  Clock clock;
  GmParams gp;
  gp.k = 8;
  gp.p = kSiegelModulus;
  gp.seed = 303;
  bool ok = true;
  std::string detail = "p = " + std::to_string(gp.p) + ", 2000 lattices:";
  for (double v : {0.5, 1.0, 2.0, 4.0}) {
    const std::vector<double> counts = siegel_counts(gp, v, 2000);
    const MeanStat m = mean_stat(counts);
    const bool pass = std::abs(m.mean - v) <= 3.0 * m.stderr_;
    ok = ok && pass;
    detail += " V=" + fmt("%g", v) + " mean " + fmt("%.3f", m.mean) + "+-" +
              fmt("%.3f", m.stderr_) + (pass ? "" : " (outside 3 SE)") + ";";
  }
  const double s = clock.seconds();
  return {ok && s <= 300, detail + " " + fmt("%.1f s", s) + " (limit 300 s)"};
}

Outcome schmidt() {
  Clock clock;
  GmParams gp;
  gp.k = 12;
  gp.seed = 404;
  bool ok = true;
  std::string detail = "2000 lattices:";
  for (double v : {0.5, 1.0, 2.0}) {
    Region region;
    Ball b;
    b.radius = geometry::radius_for_volume(12, v);
    b.center = Vector::Zero(12);
    b.center(0) = 2.0 * b.radius;
    region.balls.push_back(b);
    const Estimate e = empty_probability(gp, region, 2000);
    const double dev = std::abs(e.p_hat - std::exp(-v));
    const bool pass = dev <= 0.02 + 3.0 * e.ci_half;
    ok = ok && pass;
    detail += " V=" + fmt("%g", v) + " p=" + fmt("%.4f", e.p_hat) + " vs " +
              fmt("%.4f", std::exp(-v)) + ";";
  }
  const double s = clock.seconds();
  return {ok && s <= 300, detail + " tol 0.02 + 3 CI, " + fmt("%.1f s", s) + " (limit 300 s)"};
}

Outcome zk_closed_form(std::vector<CollisionCurve>* curves) {
  Clock clock;
  const Decoder dec(zk_lattice(16));
  bool ok = true;
  std::string detail = "1e6 trials:";
  for (double d : {0.5, 1.0, 2.0}) {
    McOptions mo;
    mo.seed = 505;
    const Estimate e = estimate_p(dec, d, 1'000'000, mo);
    const double exact = zk_collision_probability(16, d);
    const bool pass = std::abs(e.p_hat - exact) <= std::max(0.01, 3.0 * e.ci_half);
    ok = ok && pass;
    detail += " D=" + fmt("%g", d) + " " + fmt("%.5f", e.p_hat) + " vs " + fmt("%.5f", exact) + ";";
  }
  McOptions mo;
  mo.seed = 506;
  curves->push_back(estimate_curve(dec, default_grid(16, 2.0), 100000, mo));
  const double s = clock.seconds();
  return {ok && s <= 120, detail + " tol max(0.01, 3 CI), " + fmt("%.1f s", s) + " (limit 120 s)"};
}

Outcome monotone(const std::vector<CollisionCurve>& curves) {
  bool ok = true;
  std::size_t checked = 0;
  for (const CollisionCurve& c : curves) {
    for (std::size_t i = 0; i + 1 < c.p_hat.size(); ++i, ++checked)
      ok = ok && c.p_hat[i + 1] <= c.p_hat[i] + c.ci_half[i] + c.ci_half[i + 1];
  }
  bool strict = true;
  for (int k : {8, 16, 24}) {
    const CollisionCurve o = zk_oracle_curve(k, default_grid(k, 2.0));
    for (std::size_t i = 0; i + 1 < o.p_hat.size(); ++i) strict = strict && o.p_hat[i + 1] < o.p_hat[i];
  }
  return {ok && strict && !curves.empty(),
          std::to_string(curves.size()) + " estimated curves, " + std::to_string(checked) +
              " steps within CI slack: " + (ok ? "yes" : "no") +
              "; Z^k oracle strictly decreasing for k = 8, 16, 24: " + (strict ? "yes" : "no")};
}

Outcome sandwich(std::vector<double>* per_lattice) {
  Clock clock;
  GmParams gp;
  gp.k = 16;
  gp.seed = 707;
  std::vector<LatticePtr> ls;
  for (std::uint64_t j = 0; j < 200; ++j) ls.push_back(sample_gm(gp, j));
  const analysis::SandwichReport r = analysis::check_sandwich(ls, 2.0, 10000, 708);
  *per_lattice = r.per_lattice;
  const double sigma = r.mean.stderr_;
  const double lo = r.bounds.lower - 3 * sigma, hi = r.bounds.upper + 3 * sigma;
  const bool ok = r.mean.mean >= lo && r.mean.mean <= hi;
  const double s = clock.seconds();
  return {ok && s <= 900, "mean " + fmt("%.4e", r.mean.mean) + " in [" + fmt("%.4f", lo) + ", " +
                              fmt("%.4f", hi) + "], 200 lattices x 1e4 trials, " +
                              fmt("%.1f s", s) + " (limit 900 s)"};
}

Outcome exponents() {
  Clock clock;
  std::string detail = "E = " + fmt("%g", kCalibratedEnvelope) + ":";
  bool ok = true;
  double prev = INFINITY;
  for (int k : {64, 144, 256}) {
    const double m = analysis::exponent_multiplier(k, 1.0);
    const double dev = std::abs(m - 1.0);
    ok = ok && dev <= kCalibratedEnvelope / std::sqrt(static_cast<double>(k)) && dev < prev;
    prev = dev;
    detail += " k=" + std::to_string(k) + " multiplier " + fmt("%.5f", m) + ";";
  }
  const double s = clock.seconds();
  return {ok && s <= 600, detail + " deviation shrinking, " + fmt("%.1f s", s) + " (limit 600 s)"};
}

Outcome quad_vs_mc() {
  bool ok = true;
  std::string detail = "k=32:";
  analysis::IntegralOptions opt;
  opt.mc_samples = 100000;
  opt.seed = 909;
  for (double beta : {1.0, 2.0}) {
    const double d2 = beta * std::sqrt(32.0);
    const double q = analysis::integral_i(32, d2, analysis::Method::kQuadrature).value();
    const double m = analysis::integral_i(32, d2, analysis::Method::kMonteCarlo, opt).value();
    const double rel = std::abs(m / q - 1.0);
    ok = ok && rel <= 0.05;
    detail += " beta=" + fmt("%g", beta) + " quad " + fmt("%.5e", q) + " mc " + fmt("%.5e", m) +
              " (rel " + fmt("%.4f", rel) + ");";
  }
  return {ok, detail + " tol 0.05"};
}

Outcome rho_trend(std::vector<CollisionCurve>* curves) {
  Clock clock;
  const double c = 1.5;
  std::vector<double> best;
  std::string detail;
  for (int k : {8, 16, 24}) {
    GmParams gp;
    gp.k = k;
    gp.seed = 1010;
    double b = 2.0;
    for (std::uint64_t j = 0; j < 5; ++j) {
      McOptions mo;
      mo.seed = 1011 + j;
      CollisionCurve curve = estimate_curve(Decoder(sample_gm(gp, j)), default_grid(k, c), 1'000'000, mo);
      b = std::min(b, estimate_rho(curve, c).rho);
      curves->push_back(std::move(curve));
    }
    best.push_back(b);
    detail += "rho(" + std::to_string(k) + ") = " + fmt("%.4f", b) + "; ";
  }
  const double bound = 1.0 / (c * c) + 1.5 / std::sqrt(24.0);
  const bool ok = best[1] < best[0] && best[2] < best[1] && best[2] <= bound;
  const double s = clock.seconds();
  return {ok && s <= 1800, detail + "bound at 24: " + fmt("%.4f", bound) + ", " +
                               fmt("%.1f s", s) + " (limit 1800 s)"};
}

Outcome jensen(const std::vector<double>& p) {
  if (p.empty()) return {false, "no per-lattice estimates (criterion 7 did not run)"};
  std::string detail;
  bool ok = true;
  const double mean = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
  for (double g : {1.0, 2.25, 4.0}) {
    double mg = 0.0;
    for (double x : p) mg += std::pow(x, g);
    mg /= static_cast<double>(p.size());
    const bool pass = analysis::jensen_holds(p, g);
    ok = ok && pass;
    detail += "gamma=" + fmt("%g", g) + " mean(p^g) " + fmt("%.4e", mg) + " >= " +
              fmt("%.4e", std::pow(mean, g)) + "; ";
  }
  return {ok, detail + std::to_string(p.size()) + " lattices"};
}

Outcome ann_bench() {
  Clock clock;
  const ann::PlantedData data = ann::gen_planted(10000, 64, 2.0, 200, 1212);
  McOptions mo;
  mo.seed = 1213;
  const Decoder dec(e8_lattice());
  const ann::OperatingPoint op = ann::choose_operating_point(dec, 2.0, 200000, mo);
  const ann::AnnConfig cfg = ann::configure(10000, 64, 2.0, 8, op, 0.95, 1214);
  ann::AnnIndex index(cfg, e8_lattice());
  index.build(data.points);
  const ann::BenchResult r = ann::run_queries(index, data);
  const double s = clock.seconds();
  return {r.recall >= 0.9 && r.far_returns == 0 && s <= 300,
          "recall " + fmt("%.3f", r.recall) + " (min 0.9), far returns " +
              std::to_string(r.far_returns) + ", tables " + std::to_string(cfg.tables) + ", m " +
              std::to_string(cfg.m) + ", mean query " + fmt("%.4f ms", r.mean_query_seconds * 1e3) +
              ", " + fmt("%.1f s", s) + " (limit 300 s)"};
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& cli, const std::string& args, const fs::path& log) {
  const std::string cmd = "\"" + cli + "\" " + args + " >\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return status;
}

Outcome cli_reproducible(const std::string& cli, const fs::path& scratch) {
  if (cli.empty()) return {false, "no --cli path given"};
  const std::vector<std::pair<std::string, std::string>> commands{
      {"lattice", "sample-lattice --lattice gm --k 12 --index 3 -o {}/lattice.txt"},
      {"collision", "collision --lattice e8 --trials 20000 -o {}/collision.csv"},
      {"rho", "rho --k 8,12 --lattice gm --lattices 2 --trials 5000 -o {}/rho.json"},
      {"siegel", "verify --suite siegel --lattices 200 -o {}/siegel.json"},
      {"schmidt", "verify --suite schmidt --lattices 200 -o {}/schmidt.json"},
      {"rogers", "verify --suite rogers --lattices 4 --trials 5000 -o {}/rogers.json"},
      {"sandwich", "verify --suite sandwich --lattices 8 --trials 2000 -o {}/sandwich.json"},
      {"schmidt-ap", "verify --suite schmidt-ap --lattices 100 --trials 4 -o {}/ap.json"},
      {"exponents", "verify --suite exponents --k 16 -o {}/exponents.json"},
      {"ann", "ann-bench --n 2000 --d 32 --queries 20 --trials 20000 -o {}/ann --dataset {}/data"},
  };
  std::vector<std::string> bad;
  for (const auto& [name, pattern] : commands) {
    std::vector<int> codes;
    std::vector<fs::path> dirs;
    for (int workers : {1, 3, 1}) {
      const fs::path dir = scratch / (name + "_" + std::to_string(dirs.size()));
      fs::remove_all(dir);
      fs::create_directories(dir);
      std::string args = pattern;
      for (auto at = args.find("{}"); at != std::string::npos; at = args.find("{}"))
        args.replace(at, 2, dir.string());
      args += " --seed 77 --workers " + std::to_string(workers);
      codes.push_back(run_cli(cli, args, dir / "log.txt"));
      dirs.push_back(dir);
    }
    bool same = codes[0] == codes[1] && codes[1] == codes[2];
    std::set<std::string> files;
    for (const auto& e : fs::directory_iterator(dirs[0])) {
      const std::string f = e.path().filename().string();
      if (f == "log.txt" || f.ends_with(".timing.json")) continue;
      files.insert(f);
    }
    same = same && !files.empty();
    for (const std::string& f : files)
      for (std::size_t i = 1; i < dirs.size(); ++i)
        same = same && fs::exists(dirs[i] / f) && slurp(dirs[0] / f) == slurp(dirs[i] / f);
    if (!same) bad.push_back(name);
  }
  std::string detail = std::to_string(commands.size()) + " invocations x workers {1, 3, 1}";
  if (bad.empty()) return {true, detail + ", all artifacts byte-identical"};
  for (const auto& b : bad) detail += " differs:" + b;
  return {false, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string cli, only, scratch = (fs::temp_directory_path() / "llsh_acceptance").string();
  app.add_option("--cli", cli, "Path to the llsh executable");
  app.add_option("--only", only, "Comma-separated criterion numbers");
  app.add_option("--scratch", scratch, "Directory for CLI artifacts");
  CLI11_PARSE(app, argc, argv);

  std::set<int> selected;
  if (!only.empty()) {
    std::stringstream ss(only);
    std::string item;
    while (std::getline(ss, item, ',')) selected.insert(std::stoi(item));
  }
  auto want = [&](int id) { return selected.empty() || selected.count(id) > 0; };

  std::vector<CollisionCurve> curves;
  std::vector<double> per_lattice;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"enumeration agrees with brute force", enum_vs_brute},
      {"structured decoders agree with enumeration", structured_vs_enum},
      {"mean lattice point count matches volume", siegel},
      {"empty-ball probability near exp(-V)", schmidt},
      {"Z^16 collision estimate matches closed form", [&] { return zk_closed_form(&curves); }},
      {"collision curves are non-increasing", [&] {
         if (!want(5) || !want(10)) return Outcome{false, "needs criteria 5 and 10 in the same run"};
         return monotone(curves);
       }},
      {"ensemble collision mean inside the sandwich", [&] { return sandwich(&per_lattice); }},
      {"exponent multiplier within E/sqrt(k)", exponents},
      {"quadrature and Monte Carlo agree", quad_vs_mc},
      {"ensemble exponent decreases with k", [&] { return rho_trend(&curves); }},
      {"power means dominate the mean", [&] { return jensen(per_lattice); }},
      {"planted-neighbour recall", ann_bench},
      {"CLI artifacts reproducible", [&] { return cli_reproducible(cli, scratch); }},
  };
  // Criterion 6 reads the curves produced by 5 and 10, and 11 reads 7.
  const std::vector<int> order{1, 2, 3, 4, 5, 7, 8, 9, 10, 11, 12, 13, 6};
  std::vector<std::string> lines(criteria.size());
  int failed = 0;
  for (int id : order) {
    if (!want(id)) continue;
    Outcome o;
    try {
      o = criteria[id - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    lines[id - 1] = std::string(o.pass ? "PASS" : "FAIL") + "  [" + std::to_string(id) + "] " +
                    criteria[id - 1].first + ": " + o.detail;
    std::printf("%s\n", lines[id - 1].c_str());
    std::fflush(stdout);
  }
  std::printf("\nsummary (criterion order):\n");
  for (const auto& l : lines)
    if (!l.empty()) std::printf("%s\n", l.c_str());
  std::printf("%d failed\n", failed);
  return failed == 0 ? 0 : 1;
}
