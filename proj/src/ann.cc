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

#include "llsh/ann.h"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <unordered_set>

#include "llsh/errors.h"
#include "llsh/random.h"
#include "llsh/stats.h"

namespace llsh::ann {

Plan plan_params(std::uint64_t n, double p1, double p2) {
  if (!(p2 > 0.0) || !(p1 < 1.0) || !(p1 > p2))
    throw InvalidArgument("plan_params needs 0 < p2 < p1 < 1");
  if (n < 1) throw InvalidArgument("plan_params needs n >= 1");
  Plan plan;
  const double ln_n = std::log(static_cast<double>(n));
  plan.rho = std::log(1.0 / p1) / std::log(1.0 / p2);
  plan.m = std::max(1, static_cast<int>(std::ceil(ln_n / std::log(1.0 / p2) - 1e-12)));
  plan.tables = std::max(1, static_cast<int>(std::ceil(std::exp(plan.rho * ln_n) - 1e-9)));
  return plan;
}

int tables_for_recall(double p1, int m, double target) {
  if (!(p1 > 0.0 && p1 <= 1.0) || m < 1 || !(target > 0.0 && target < 1.0))
    throw InvalidArgument("tables_for_recall needs p1 in (0, 1], m >= 1, target in (0, 1)");
  const double hit = std::pow(p1, m);
  if (hit >= 1.0) return 1;
  const double tables = std::log(1.0 - target) / std::log1p(-hit);
  if (tables > 1e7) throw InvalidArgument("tables_for_recall: more than 1e7 tables needed");
  return std::max(1, static_cast<int>(std::ceil(tables)));
}

OperatingPoint choose_operating_point(const Decoder& decoder, double c,
                                      std::uint64_t trials, const McOptions& opt) {
  const int k = decoder.lattice().dim();
  const CollisionCurve curve = estimate_curve(decoder, default_grid(k, c), trials, opt);
  const RhoEstimate best = estimate_rho(curve, c);
  const CollisionCurve pair =
      estimate_curve(decoder, {best.argmin_delta, c * best.argmin_delta}, trials, opt);
  OperatingPoint op;
  op.delta = best.argmin_delta;
  op.p1 = pair.p_hat[0];
  op.p2 = pair.p_hat[1];
  if (!(op.p2 > 0.0) || !(op.p1 > op.p2))
    throw EstimationFailed("operating point has no usable probability gap");
  op.rho = std::log(1.0 / op.p1) / std::log(1.0 / op.p2);
  return op;
}

AnnConfig configure(std::uint64_t n, int d, double c, int k, const OperatingPoint& op,
                    double target_recall, std::uint64_t seed) {
  const Plan plan = plan_params(n, op.p1, op.p2);
  AnnConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.c = c;
  cfg.k = k;
  cfg.m = plan.m;
  cfg.tables = std::max(plan.tables, tables_for_recall(op.p1, plan.m, target_recall));
  cfg.scale = op.delta;
  cfg.seed = seed;
  return cfg;
}

std::size_t KeyHash::operator()(const Key& key) const noexcept {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::int64_t v : key) {
    std::uint64_t s = h + static_cast<std::uint64_t>(v);
    h = splitmix64(s);
  }
  return static_cast<std::size_t>(h);
}

AnnIndex::AnnIndex(AnnConfig config, LatticePtr lattice, DecoderKind kind)
    : config_(config), decoder_(std::move(lattice), kind) {
  if (config_.m < 1 || config_.tables < 1) throw InvalidArgument("need m >= 1 and tables >= 1");
  if (config_.d < 1) throw InvalidArgument("need d >= 1");
  if (!(config_.c > 1.0) || !(config_.r > 0.0) || !(config_.scale > 0.0))
    throw InvalidArgument("need c > 1, r > 0 and scale > 0");
  if (decoder_.lattice().dim() != config_.k)
    throw InvalidArgument("lattice dimension does not match k");
  const int k = config_.k;
  const double s = config_.scale / config_.r;
  tables_.resize(config_.tables);
  for (int t = 0; t < config_.tables; ++t) {
    Stream rng(config_.seed, static_cast<std::uint64_t>(t));
    Table& table = tables_[t];
    table.projection.resize(static_cast<Eigen::Index>(k) * config_.m, config_.d);
    table.shift.resize(static_cast<Eigen::Index>(k) * config_.m);
    for (int j = 0; j < config_.m; ++j) {
      const HashFunction h = HashFunction::draw(decoder_, config_.d, rng);
      table.projection.middleRows(j * k, k) = s * h.projection();
      table.shift.segment(j * k, k) = h.shift();
    }
  }
}

Key AnnIndex::key(int table, const Vector& a) const {
  const Table& t = tables_[table];
  const Vector z = t.projection * a + t.shift;
  const int k = config_.k;
  Key out;
  out.reserve(static_cast<std::size_t>(k) * config_.m);
  for (int j = 0; j < config_.m; ++j) {
    const CvpResult r = decoder_.decode(z.segment(j * k, k));
    out.insert(out.end(), r.coeffs.data(), r.coeffs.data() + k);
  }
  return out;
}

void AnnIndex::build(const Matrix& points, int workers) {
  if (points.cols() != config_.d) throw InvalidArgument("points must have d columns");
  if (!points.allFinite()) throw InvalidArgument("points must be finite");
  if (points.rows() > std::numeric_limits<std::uint32_t>::max())
    throw InvalidArgument("too many points");
  points_ = points;
  config_.n = static_cast<std::uint64_t>(points.rows());
  parallel_blocks(tables_.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      auto& buckets = tables_[t].buckets;
      buckets.clear();
      for (Eigen::Index i = 0; i < points_.rows(); ++i) {
        Key k;
        try {
          k = key(static_cast<int>(t), points_.row(i).transpose());
        } catch (const BudgetExceeded& e) {
          throw BuildFailure(std::string("decoder budget exceeded: ") + e.what(),
                             static_cast<std::size_t>(i));
        }
        buckets[std::move(k)].push_back(static_cast<std::uint32_t>(i));
      }
    }
  });
}

AnnIndex::Result AnnIndex::query(const Vector& q) const {
  Result res;
  if (q.size() != config_.d || !q.allFinite()) throw InvalidArgument("query must be finite with d entries");
  const std::uint64_t budget = config_.budget ? config_.budget : 3ULL * config_.tables;
  const double limit = config_.c * config_.r;
  std::unordered_set<std::uint32_t> seen;
  double best = std::numeric_limits<double>::infinity();
  std::optional<std::uint32_t> best_id;
  for (int t = 0; t < config_.tables && res.candidates < budget; ++t) {
    Key k;
    try {
      k = key(t, q);
    } catch (const BudgetExceeded&) {
      continue;
    }
    const auto it = tables_[t].buckets.find(k);
    if (it == tables_[t].buckets.end()) continue;
    for (std::uint32_t id : it->second) {
      if (res.candidates >= budget) break;
      if (!seen.insert(id).second) continue;
      ++res.candidates;
      const double dist = (points_.row(id).transpose() - q).norm();
      if (dist <= limit) {
        res.id = id;
        res.distance = dist;
        return res;
      }
      if (dist < best) {
        best = dist;
        best_id = id;
      }
    }
  }
  if (best_id && best <= limit) {
    res.id = best_id;
    res.distance = best;
  }
  return res;
}

PlantedData gen_planted(std::uint64_t n, int d, double c, std::uint64_t queries,
                        std::uint64_t seed, int workers) {
  if (d < 8) throw InvalidArgument("gen_planted needs d >= 8");
  if (!(c > 1.0)) throw InvalidArgument("gen_planted needs c > 1");
  if (queries > n) throw GenerationFailure("more queries than points: each query needs a planted neighbour");
  const double r = 1.0;
  const double s = 2.0 * c * r / std::sqrt(2.0 * d);
  PlantedData data;
  data.points.resize(static_cast<Eigen::Index>(n), d);
  data.queries.resize(static_cast<Eigen::Index>(queries), d);
  // Streams 0 .. n-1 for points and n .. n+queries-1 for queries.
  parallel_blocks(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Stream rng(seed, i);
      for (int j = 0; j < d; ++j) data.points(static_cast<Eigen::Index>(i), j) = s * rng.normal();
    }
  });
  const std::uint64_t stride = queries ? n / queries : 0;
  for (std::uint64_t q = 0; q < queries; ++q) {
    Stream rng(seed, n + q);
    Vector query(d), dir(d);
    for (int j = 0; j < d; ++j) query(j) = s * rng.normal();
    for (int j = 0; j < d; ++j) dir(j) = rng.normal();
    dir /= dir.norm();
    const auto id = static_cast<std::uint32_t>(q * stride);
    data.queries.row(static_cast<Eigen::Index>(q)) = query.transpose();
    data.points.row(id) = (query + r * dir).transpose();
    data.planted.push_back(id);
  }
  if (queries == 0) return data;

  std::vector<char> is_planted(n, 0);
  for (std::uint32_t id : data.planted) is_planted[id] = 1;
  const double limit = c * r;
  const std::uint64_t close = parallel_count(n, workers, [&](std::size_t begin, std::size_t end) {
    std::uint64_t count = 0;
    for (std::size_t i = begin; i < end; ++i) {
      if (is_planted[i]) continue;
      const auto row = data.points.row(static_cast<Eigen::Index>(i));
      for (Eigen::Index q = 0; q < data.queries.rows(); ++q) {
        if ((data.queries.row(q) - row).norm() <= limit) {
          ++count;
          break;
        }
      }
    }
    return count;
  });
  const std::uint64_t background = n - queries;
  data.background_close_fraction =
      background ? static_cast<double>(close) / static_cast<double>(background) : 0.0;
  if (data.background_close_fraction > 0.01) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%.2f%% of background points lie within c*r of a query (limit 1%%); "
                  "increase d or decrease n",
                  100.0 * data.background_close_fraction);
    throw GenerationFailure(buf);
  }
  return data;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_dataset(const std::string& path, const Matrix& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out.write("LLSH", 4);
  put_u32(out, static_cast<std::uint32_t>(points.rows()));
  put_u32(out, static_cast<std::uint32_t>(points.cols()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      const auto bits = std::bit_cast<std::uint64_t>(points(i, j));
      char b[8];
      for (int s = 0; s < 8; ++s) b[s] = static_cast<char>((bits >> (8 * s)) & 0xff);
      out.write(b, 8);
    }
  }
  if (!out) throw Error("write failed for " + path);
}

Matrix read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "LLSH") throw InvalidArgument(path + ": bad magic");
  const std::uint32_t n = get_u32(in);
  const std::uint32_t d = get_u32(in);
  if (!in) throw InvalidArgument(path + ": truncated header");
  Matrix points(n, d);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) {
      unsigned char b[8];
      in.read(reinterpret_cast<char*>(b), 8);
      std::uint64_t bits = 0;
      for (int s = 0; s < 8; ++s) bits |= static_cast<std::uint64_t>(b[s]) << (8 * s);
      points(i, j) = std::bit_cast<double>(bits);
    }
  }
  if (!in) throw InvalidArgument(path + ": truncated data");
  return points;
}

void write_truth(std::ostream& out, const std::vector<std::uint32_t>& planted) {
  out << "query_id,planted_id\n";
  for (std::size_t q = 0; q < planted.size(); ++q) out << q << ',' << planted[q] << '\n';
}

BenchResult run_queries(const AnnIndex& index, const PlantedData& data) {
  BenchResult res;
  const double limit = index.config().c * index.config().r;
  std::uint64_t good = 0;
  const auto start = std::chrono::steady_clock::now();
  for (Eigen::Index q = 0; q < data.queries.rows(); ++q) {
    const AnnIndex::Result r = index.query(data.queries.row(q).transpose());
    QueryRecord rec;
    rec.query_id = static_cast<std::uint32_t>(q);
    rec.planted_id = data.planted[static_cast<std::size_t>(q)];
    rec.returned = r.id;
    rec.distance = r.distance;
    rec.candidates = r.candidates;
    if (r.id) {
      if (r.distance <= limit) ++good;
      else ++res.far_returns;
    }
    res.records.push_back(rec);
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto nq = static_cast<double>(data.queries.rows());
  res.recall = nq > 0 ? static_cast<double>(good) / nq : 1.0;
  res.mean_query_seconds = nq > 0 ? elapsed / nq : 0.0;
  return res;
}

void write_query_csv(std::ostream& out, const BenchResult& result) {
  out << "query_id,planted_id,returned_id,distance,candidates\n";
  char buf[64];
  for (const QueryRecord& r : result.records) {
    out << r.query_id << ',' << r.planted_id << ',';
    if (r.returned) {
      std::snprintf(buf, sizeof buf, "%.17g", r.distance);
      out << *r.returned << ',' << buf;
    } else {
      out << "-1,nan";
    }
    out << ',' << r.candidates << '\n';
  }
}

}  // namespace llsh::ann
