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

// Command-line front end: sample-lattice, collision, rho, verify, ann-bench.
//
// Exit codes: 0 success, 1 runtime failure (including a failed verify
// verdict), 2 usage error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "llsh/ann.h"
#include "llsh/errors.h"
#include "llsh/lattice.h"
#include "llsh/lshcore.h"
#include "llsh/randlat.h"
#include "llsh/report.h"
#include "llsh/suites.h"

namespace {

using llsh::report::Json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string output = "-";
  std::string config;

  std::uint64_t resolved_seed() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("LLSH_SEED")) {
      try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(env, &used);
        if (used == std::string(env).size()) return v;
      } catch (const std::exception&) {
      }
      throw UsageError("LLSH_SEED is not an unsigned integer");
    }
    return 1;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed (default: $LLSH_SEED, then 1)");
  cmd->add_option("--workers", c.workers, "Worker threads; never changes results")
      ->check(CLI::Range(1, 1024));
  cmd->add_option("-o,--output", c.output, "Output path ('-' for stdout)");
  cmd->add_option("--config", c.config, "JSON file with flag defaults");
}

// Lattice source grammar: zk | dk | e8 | gm | gm:<prime> | file:<path>.
struct Source {
  std::string kind;
  std::uint64_t p = llsh::kDefaultModulus;
  std::string path;

  std::string describe() const {
    if (kind == "gm") return "gm:" + std::to_string(p);
    if (kind == "file") return "file:" + path;
    return kind;
  }
};

Source parse_source(const std::string& s) {
  Source src;
  if (s == "zk" || s == "dk" || s == "e8" || s == "gm") {
    src.kind = s;
  } else if (s.rfind("gm:", 0) == 0) {
    src.kind = "gm";
    try {
      std::size_t used = 0;
      src.p = std::stoull(s.substr(3), &used);
      if (used != s.size() - 3) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("bad modulus in lattice source '" + s + "'");
    }
    if (!llsh::is_prime(src.p) || src.p < (1u << 16))
      throw UsageError("gm modulus must be a prime >= 65536");
  } else if (s.rfind("file:", 0) == 0 && s.size() > 5) {
    src.kind = "file";
    src.path = s.substr(5);
  } else {
    throw UsageError("unknown lattice source '" + s + "' (zk|dk|e8|gm[:p]|file:path)");
  }
  return src;
}

llsh::LatticePtr make_lattice(const Source& src, int k, std::uint64_t seed,
                              std::uint64_t index) {
  if (src.kind == "e8") {
    if (k != 0 && k != 8) throw UsageError("e8 needs k = 8");
    return llsh::e8_lattice();
  }
  if (src.kind == "file") {
    std::ifstream in(src.path);
    if (!in) throw llsh::Error("cannot open " + src.path);
    const llsh::BasisFile f = llsh::read_basis(in);
    if (k != 0 && f.columns.cols() != k) throw UsageError("basis file dimension differs from --k");
    if (!f.normalize && std::abs(llsh::abs_determinant(f.columns) - 1.0) > 1e-9)
      throw llsh::InvalidArgument("basis file has normalize=0 but |det| != 1");
    return llsh::normalize_det(llsh::Basis(f.columns), llsh::Structure::kGeneral,
                               "file:" + src.path);
  }
  if (k < 1) throw UsageError("--k is required for lattice source " + src.kind);
  if (src.kind == "zk") return llsh::zk_lattice(k);
  if (src.kind == "dk") {
    if (k < 3) throw UsageError("dk needs k >= 3");
    return llsh::dk_lattice(k);
  }
  llsh::GmParams gp;
  gp.k = k;
  gp.p = src.p;
  gp.seed = seed;
  return llsh::sample_gm(gp, index);
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError(std::string("bad number '") + tok + "' in " + what);
    }
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what);
  return out;
}

// Writes text to a path or stdout.
void emit(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw llsh::Error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw llsh::Error("write failed for " + path);
}

class Timer {
 public:
  Timer() : started_(llsh::report::utc_now()), t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }
  // Timing sidecar next to a file artifact; nothing for stdout. Anything
  // that may differ between identical runs goes here.
  void write(const std::string& path, const Json& extra = Json::object()) const {
    if (path != "-") llsh::report::write_timing(path, started_, seconds(), extra);
  }

 private:
  std::string started_;
  std::chrono::steady_clock::time_point t0_;
};

// Moves flags from a --config JSON object in front of the command line
// unless the command line already sets them.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path);
  Json cfg;
  try {
    cfg = Json::parse(in);
  } catch (const std::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config " + path + " must be a JSON object");
  auto given = [&](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> extra;
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    const std::string flag = "--" + it.key();
    if (it.key() == "config" || given(flag)) continue;
    const Json& v = it.value();
    if (v.is_boolean()) {
      if (v.get<bool>()) extra.push_back(flag);
      continue;
    }
    std::string text;
    if (v.is_string()) {
      text = v.get<std::string>();
    } else if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i)
        text += (i ? "," : "") + (v[i].is_string() ? v[i].get<std::string>() : v[i].dump());
    } else {
      text = v.dump();
    }
    extra.push_back(flag + "=" + text);
  }
  // Flags go right after the subcommand name.
  if (args.size() < 2) return args;
  args.insert(args.begin() + 2, extra.begin(), extra.end());
  return args;
}

Json base_config(const Common& c, std::uint64_t seed) {
  return Json{{"seed", seed}};
}

// ----- sample-lattice -----

struct SampleArgs {
  Common common;
  int k = 0;
  std::string source = "gm";
  std::uint64_t index = 0;
};

int cmd_sample_lattice(const SampleArgs& a) {
  const Source src = parse_source(a.source);
  const std::uint64_t seed = a.common.resolved_seed();
  const llsh::LatticePtr l = make_lattice(src, a.k, seed, a.index);
  std::ostringstream out;
  llsh::write_basis(out, llsh::BasisFile{l->reduced(), true});
  out << "# source=" << src.describe() << " index=" << a.index << " k=" << l->dim() << '\n'
      << "# seed=" << seed << '\n'
      << "# version=" << llsh::report::version() << '\n';
  emit(a.common.output, out.str());
  return 0;
}

// ----- collision -----

struct CollisionArgs {
  Common common;
  int k = 0;
  std::string source = "zk";
  std::uint64_t index = 0;
  std::string grid;
  double c = 2.0;
  std::uint64_t trials = 100000;
  bool oracle = false;
};

int cmd_collision(const CollisionArgs& a) {
  Timer timer;
  const Source src = parse_source(a.source);
  const std::uint64_t seed = a.common.resolved_seed();
  const llsh::LatticePtr l = make_lattice(src, a.k, seed, a.index);
  const std::vector<double> grid =
      a.grid.empty() ? llsh::default_grid(l->dim(), a.c) : parse_list(a.grid, "--grid");
  if (a.oracle && src.kind != "zk") throw UsageError("--oracle is only available for zk");

  Json config = base_config(a.common, seed);
  config["k"] = l->dim();
  config["lattice"] = src.describe();
  config["index"] = a.index;
  config["grid"] = grid;
  config["trials"] = a.trials;
  config["oracle"] = a.oracle;

  std::ostringstream csv;
  int code = 0;
  Json result;
  llsh::CollisionCurve curve;
  if (a.oracle) {
    curve = llsh::zk_oracle_curve(l->dim(), grid);
    llsh::write_curve_csv(csv, curve);
  } else {
    llsh::McOptions mo;
    mo.seed = seed;
    mo.workers = a.common.workers;
    try {
      curve = llsh::estimate_curve(llsh::Decoder(l), grid, a.trials, mo);
      llsh::write_curve_csv(csv, curve);
    } catch (const llsh::EstimationFailed& e) {
      std::cerr << "error: " << e.what() << '\n';
      curve.deltas = grid;
      curve.p_hat.assign(grid.size(), std::nan(""));
      curve.ci_half.assign(grid.size(), std::nan(""));
      curve.trials = a.trials;
      llsh::write_curve_csv(csv, curve, true);
      result["error"] = e.what();
      code = 1;
    }
  }
  emit(a.common.output, csv.str());
  if (a.common.output != "-") {
    result["lattice_id"] = l->id();
    result["failures"] = curve.failures;
    llsh::report::write_json(a.common.output + ".meta.json",
                             llsh::report::envelope("collision", seed, config, result));
    timer.write(a.common.output, Json{{"workers", a.common.workers}});
  }
  return code;
}

// ----- rho -----

struct RhoArgs {
  Common common;
  std::string ks = "8";
  std::string source = "gm";
  std::string grid;
  double c = 1.5;
  std::uint64_t trials = 100000;
  std::uint64_t lattices = 1;
  bool oracle = false;
};

int cmd_rho(const RhoArgs& a) {
  Timer timer;
  const Source src = parse_source(a.source);
  const std::uint64_t seed = a.common.resolved_seed();
  if (!(a.c >= 1.0)) throw UsageError("--c must be >= 1");
  if (a.oracle && src.kind != "zk") throw UsageError("--oracle is only available for zk");
  if (a.lattices < 1) throw UsageError("--lattices must be >= 1");
  const std::vector<double> kd = parse_list(a.ks, "--k");

  Json config = base_config(a.common, seed);
  config["k"] = kd;
  config["lattice"] = src.describe();
  config["c"] = a.c;
  config["trials"] = a.trials;
  config["lattices"] = a.lattices;
  config["oracle"] = a.oracle;
  if (!a.grid.empty()) config["grid"] = parse_list(a.grid, "--grid");

  Json rows = Json::array();
  std::vector<double> best_by_k;
  for (double kv : kd) {
    const int k = static_cast<int>(kv);
    if (k != kv || k < 1) throw UsageError("--k entries must be positive integers");
    const std::vector<double> grid =
        a.grid.empty() ? llsh::default_grid(k, a.c) : parse_list(a.grid, "--grid");
    const std::uint64_t count = src.kind == "gm" ? a.lattices : 1;
    Json per = Json::array();
    double best = 2.0;
    for (std::uint64_t j = 0; j < count; ++j) {
      const llsh::LatticePtr l = make_lattice(src, k, seed, j);
      llsh::CollisionCurve curve;
      if (a.oracle) {
        curve = llsh::zk_oracle_curve(k, grid);
      } else {
        llsh::McOptions mo;
        mo.seed = seed + j;
        mo.workers = a.common.workers;
        curve = llsh::estimate_curve(llsh::Decoder(l), grid, a.trials, mo);
      }
      const llsh::RhoEstimate r = llsh::estimate_rho(curve, a.c);
      best = std::min(best, r.rho);
      Json row = llsh::report::to_json(r);
      row["lattice_index"] = j;
      row["lattice_id"] = l->id();
      per.push_back(row);
    }
    best_by_k.push_back(best);
    rows.push_back(Json{{"k", k},
                        {"best_rho", best},
                        {"target", 1.0 / (a.c * a.c)},
                        {"target_plus_1_5_over_sqrt_k", 1.0 / (a.c * a.c) + 1.5 / std::sqrt(k)},
                        {"lattices", per}});
  }
  bool non_increasing = true;
  for (std::size_t i = 1; i < best_by_k.size(); ++i)
    non_increasing = non_increasing && best_by_k[i] <= best_by_k[i - 1];
  Json result{{"rows", rows}, {"non_increasing", non_increasing}};
  const std::string text =
      llsh::report::envelope("rho", seed, config, result).dump(2) + "\n";
  emit(a.common.output, text);
  timer.write(a.common.output, Json{{"workers", a.common.workers}});
  for (std::size_t i = 0; i < kd.size(); ++i)
    std::cerr << "k=" << kd[i] << " best rho=" << best_by_k[i] << '\n';
  return 0;
}

// ----- verify -----

struct VerifyArgs {
  Common common;
  std::string suite;
  llsh::suites::SuiteOptions opt;
};

int cmd_verify(VerifyArgs a) {
  Timer timer;
  const std::uint64_t seed = a.common.resolved_seed();
  a.opt.seed = seed;
  a.opt.workers = a.common.workers;
  if (a.opt.p && (!llsh::is_prime(a.opt.p) || a.opt.p < (1u << 16)))
    throw UsageError("--p must be a prime >= 65536");
  llsh::suites::SuiteResult res;
  try {
    res = llsh::suites::run(a.suite, a.opt);
  } catch (const llsh::suites::UnknownSuite& e) {
    std::string known;
    for (const auto& n : llsh::suites::names()) known += " " + n;
    throw UsageError(std::string(e.what()) + "; known suites:" + known);
  }
  Json config = base_config(a.common, seed);
  config["suite"] = a.suite;
  config["k"] = a.opt.k;
  config["lattices"] = a.opt.lattices;
  config["trials"] = a.opt.trials;
  config["p"] = a.opt.p;
  config["c"] = a.opt.c;
  config["delta"] = a.opt.delta;
  config["envelope"] = a.opt.envelope;
  Json result = res.report;
  result["verdict"] = res.pass ? "pass" : "fail";
  emit(a.common.output, llsh::report::envelope("verify", seed, config, result).dump(2) + "\n");
  timer.write(a.common.output, Json{{"workers", a.common.workers}});
  std::cerr << "suite " << res.name << ": " << (res.pass ? "pass" : "fail") << '\n';
  return res.pass ? 0 : 1;
}

// ----- ann-bench -----

struct AnnArgs {
  Common common;
  std::uint64_t n = 10000;
  int d = 64;
  double c = 2.0;
  int k = 8;
  std::string source = "e8";
  std::uint64_t queries = 200;
  double target = 0.95;
  std::uint64_t trials = 200000;
  std::string dataset;
};

int cmd_ann_bench(const AnnArgs& a) {
  Timer timer;
  const Source src = parse_source(a.source);
  const std::uint64_t seed = a.common.resolved_seed();
  if (a.common.output == "-") throw UsageError("ann-bench needs --output <prefix>");
  if (!(a.target > 0.0 && a.target < 1.0)) throw UsageError("--target-recall must be in (0, 1)");
  const llsh::LatticePtr l = make_lattice(src, a.k, seed, 0);
  const llsh::Decoder dec(l);

  llsh::McOptions mo;
  mo.seed = seed;
  mo.workers = a.common.workers;
  const llsh::ann::OperatingPoint op = llsh::ann::choose_operating_point(dec, a.c, a.trials, mo);
  const llsh::ann::PlantedData data =
      llsh::ann::gen_planted(a.n, a.d, a.c, a.queries, seed, a.common.workers);
  const llsh::ann::AnnConfig cfg =
      llsh::ann::configure(a.n, a.d, a.c, l->dim(), op, a.target, seed);
  llsh::ann::AnnIndex index(cfg, l);
  const auto build_start = std::chrono::steady_clock::now();
  index.build(data.points, a.common.workers);
  const double build_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - build_start).count();
  const llsh::ann::BenchResult bench = llsh::ann::run_queries(index, data);

  if (!a.dataset.empty()) {
    llsh::ann::write_dataset(a.dataset + ".points.bin", data.points);
    llsh::ann::write_dataset(a.dataset + ".queries.bin", data.queries);
    std::ostringstream truth;
    llsh::ann::write_truth(truth, data.planted);
    emit(a.dataset + ".truth.csv", truth.str());
  }

  std::uint64_t planted_hits = 0;
  for (const auto& r : bench.records)
    if (r.returned && *r.returned == r.planted_id) ++planted_hits;
  Json config = base_config(a.common, seed);
  config["n"] = a.n;
  config["d"] = a.d;
  config["c"] = a.c;
  config["k"] = l->dim();
  config["lattice"] = src.describe();
  config["queries"] = a.queries;
  config["target_recall"] = a.target;
  config["trials"] = a.trials;
  Json result{{"operating_point", llsh::report::to_json(op)},
              {"index", llsh::report::to_json(cfg)},
              {"recall", bench.recall},
              {"planted_hits", planted_hits},
              {"far_returns", bench.far_returns},
              {"background_close_fraction", data.background_close_fraction}};
  llsh::report::write_json(a.common.output + ".json",
                           llsh::report::envelope("ann-bench", seed, config, result));
  std::ostringstream csv;
  llsh::ann::write_query_csv(csv, bench);
  emit(a.common.output + ".csv", csv.str());
  timer.write(a.common.output, Json{{"workers", a.common.workers},
                                    {"build_seconds", build_seconds},
                                    {"mean_query_seconds", bench.mean_query_seconds}});
  std::printf("recall=%.4f far_returns=%llu tables=%d m=%d mean_query_ms=%.4f\n", bench.recall,
              static_cast<unsigned long long>(bench.far_returns), cfg.tables, cfg.m,
              bench.mean_query_seconds * 1e3);
  return 0;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  args = expand_config(args);

  CLI::App app{"Lattice-based locality sensitive hashing experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", llsh::report::version());

  SampleArgs sample;
  auto* s = app.add_subcommand("sample-lattice", "Write a lattice basis");
  add_common(s, sample.common);
  s->add_option("--k", sample.k, "Dimension");
  s->add_option("--lattice,--ensemble", sample.source, "zk|dk|e8|gm[:p]|file:path");
  s->add_option("--index", sample.index, "Lattice number within the ensemble stream");

  CollisionArgs coll;
  auto* c = app.add_subcommand("collision", "Estimate a collision curve (CSV)");
  add_common(c, coll.common);
  c->add_option("--k", coll.k, "Dimension");
  c->add_option("--lattice", coll.source, "zk|dk|e8|gm[:p]|file:path");
  c->add_option("--index", coll.index, "Lattice number within the ensemble stream");
  c->add_option("--grid", coll.grid, "Comma-separated deltas (default: geometric grid)");
  c->add_option("--c", coll.c, "Factor used for the default grid");
  c->add_option("--trials", coll.trials, "Trials per grid point")->check(CLI::PositiveNumber);
  c->add_flag("--oracle", coll.oracle, "Closed-form curve (zk only)");

  RhoArgs rho;
  auto* r = app.add_subcommand("rho", "Estimate the LSH exponent (JSON)");
  add_common(r, rho.common);
  r->add_option("--k", rho.ks, "Dimension or comma-separated list");
  r->add_option("--lattice", rho.source, "zk|dk|e8|gm[:p]|file:path");
  r->add_option("--grid", rho.grid, "Comma-separated deltas");
  r->add_option("--c", rho.c, "Approximation factor");
  r->add_option("--trials", rho.trials, "Trials per grid point")->check(CLI::PositiveNumber);
  r->add_option("--lattices", rho.lattices, "Ensemble lattices per k; the best is reported");
  r->add_flag("--oracle", rho.oracle, "Closed-form curve (zk only)");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Run a verification suite (JSON)");
  add_common(v, ver.common);
  v->add_option("--suite", ver.suite, "siegel|schmidt|rogers|sandwich|schmidt-ap|exponents")
      ->required();
  v->add_option("--k", ver.opt.k, "Dimension");
  v->add_option("--lattices", ver.opt.lattices, "Sampled lattices");
  v->add_option("--trials", ver.opt.trials, "Trials (or pairs for schmidt-ap)");
  v->add_option("--p", ver.opt.p, "Ensemble modulus");
  v->add_option("--c", ver.opt.c, "Approximation factor (exponents)");
  v->add_option("--delta", ver.opt.delta, "Distance (sandwich)");
  v->add_option("--envelope", ver.opt.envelope, "Envelope constant (exponents)");

  AnnArgs ann;
  auto* b = app.add_subcommand("ann-bench", "Planted-neighbour ANN benchmark");
  add_common(b, ann.common);
  b->add_option("--n", ann.n, "Dataset size")->check(CLI::PositiveNumber);
  b->add_option("--d", ann.d, "Ambient dimension");
  b->add_option("--c", ann.c, "Approximation factor");
  b->add_option("--k", ann.k, "Lattice dimension");
  b->add_option("--lattice", ann.source, "zk|dk|e8|gm[:p]|file:path");
  b->add_option("--queries", ann.queries, "Number of queries");
  b->add_option("--target-recall", ann.target, "Per-query success target for table count");
  b->add_option("--trials", ann.trials, "Trials for the operating point")
      ->check(CLI::PositiveNumber);
  b->add_option("--dataset", ann.dataset, "Also write <prefix>.points.bin etc.");

  std::vector<const char*> cargv;
  for (const auto& x : args) cargv.push_back(x.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (s->parsed()) return cmd_sample_lattice(sample);
  if (c->parsed()) return cmd_collision(coll);
  if (r->parsed()) return cmd_rho(rho);
  if (v->parsed()) return cmd_verify(ver);
  return cmd_ann_bench(ann);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
