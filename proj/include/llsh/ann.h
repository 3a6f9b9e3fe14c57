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

#ifndef LLSH_ANN_H_
#define LLSH_ANN_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "llsh/cvp.h"
#include "llsh/lattice.h"
#include "llsh/lshcore.h"

namespace llsh::ann {

struct Plan {
  int m = 1;
  int tables = 1;
  double rho = 1.0;
};

// rho = ln(1/p1) / ln(1/p2), m = ceil(log_{1/p2} n), tables = ceil(n^rho).
Plan plan_params(std::uint64_t n, double p1, double p2);

// Number of tables so that a point colliding with probability p1 per hash
// lands in a shared bucket in some table with probability >= target.
int tables_for_recall(double p1, int m, double target);

struct AnnConfig {
  std::uint64_t n = 0;
  int d = 0;
  double c = 2.0;
  double r = 1.0;
  int k = 8;
  int m = 1;
  int tables = 1;
  // Inputs are multiplied by scale / r before projection, which puts the
  // distance threshold at the chosen operating point of the collision curve.
  double scale = 1.0;
  // Candidate cap per query; 0 means 3 * tables.
  std::uint64_t budget = 0;
  std::uint64_t seed = 1;
};

struct OperatingPoint {
  double delta = 0.0;  // scaled threshold r'
  double p1 = 0.0;
  double p2 = 0.0;
  double rho = 1.0;
};

// Estimates the collision curve of the decoder's lattice, picks the delta
// minimising rho for factor c and re-estimates p at delta and c * delta.
OperatingPoint choose_operating_point(const Decoder& decoder, double c,
                                      std::uint64_t trials, const McOptions& opt = {});

// Fills m, tables and scale for n points from an operating point: m from
// plan_params and tables from tables_for_recall(target), but never fewer than
// plan_params gives.
AnnConfig configure(std::uint64_t n, int d, double c, int k, const OperatingPoint& op,
                    double target_recall, std::uint64_t seed);

using Key = std::vector<std::int64_t>;

struct KeyHash {
  std::size_t operator()(const Key& key) const noexcept;
};

struct Table {
  // Row block j * k .. j * k + k - 1 is the projection of hash j, already
  // multiplied by the input scale.
  Matrix projection;
  Vector shift;  // concatenated shifts
  std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> buckets;
};

class AnnIndex {
 public:
  AnnIndex(AnnConfig config, LatticePtr lattice, DecoderKind kind = DecoderKind::kAuto);

  // Inserts every row of `points` (n x d). Tables are independent and built
  // in parallel; table t draws its hashes from Stream(seed, t).
  void build(const Matrix& points, int workers = 1);

  Key key(int table, const Vector& a) const;

  struct Result {
    std::optional<std::uint32_t> id;
    double distance = 0.0;
    std::uint64_t candidates = 0;
  };
  Result query(const Vector& q) const;

  const AnnConfig& config() const { return config_; }
  const Matrix& points() const { return points_; }
  const std::vector<Table>& tables() const { return tables_; }
  const Decoder& decoder() const { return decoder_; }

 private:
  AnnConfig config_;
  Decoder decoder_;
  std::vector<Table> tables_;
  Matrix points_;
};

struct PlantedData {
  Matrix points;   // n x d
  Matrix queries;  // queries x d
  std::vector<std::uint32_t> planted;
  double background_close_fraction = 0.0;
};

// Background points and queries are N(0, s^2 I) with s = 2 c r / sqrt(2 d),
// so that typical distances sit at 2 c r. Query j gets a planted neighbour at
// distance exactly r in a uniform direction, stored at id j * (n / queries).
// Throws GenerationFailure when more than 1% of the background lies within
// c r of some query.
PlantedData gen_planted(std::uint64_t n, int d, double c, std::uint64_t queries,
                        std::uint64_t seed, int workers = 1);

// Binary dataset: "LLSH", u32 n, u32 d, n * d little-endian doubles.
void write_dataset(const std::string& path, const Matrix& points);
Matrix read_dataset(const std::string& path);
// CSV "query_id,planted_id".
void write_truth(std::ostream& out, const std::vector<std::uint32_t>& planted);

struct QueryRecord {
  std::uint32_t query_id = 0;
  std::uint32_t planted_id = 0;
  std::optional<std::uint32_t> returned;
  double distance = 0.0;
  std::uint64_t candidates = 0;
};

struct BenchResult {
  std::vector<QueryRecord> records;
  double recall = 0.0;
  std::uint64_t far_returns = 0;
  double mean_query_seconds = 0.0;
};

// Recall counts queries answered by any point within c r.
BenchResult run_queries(const AnnIndex& index, const PlantedData& data);

void write_query_csv(std::ostream& out, const BenchResult& result);

}  // namespace llsh::ann

#endif  // LLSH_ANN_H_
