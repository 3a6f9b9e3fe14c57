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

#ifndef LLSH_REPORT_H_
#define LLSH_REPORT_H_

#include <string>

#include "json.hpp"
#include "llsh/analysis.h"
#include "llsh/ann.h"
#include "llsh/lshcore.h"
#include "llsh/stats.h"

namespace llsh::report {

using Json = nlohmann::ordered_json;

// Version string fixed at configure time (git describe, or "unknown").
std::string version();

Json to_json(const Estimate& e);
Json to_json(const MeanStat& m);
Json to_json(const analysis::IntegralResult& r);
Json to_json(const analysis::SandwichBounds& b);
Json to_json(const analysis::SandwichReport& r);
Json to_json(const analysis::ExponentReport& r);
Json to_json(const analysis::SchmidtApReport& r);
Json to_json(const CollisionCurve& c);
Json to_json(const RhoEstimate& r);
Json to_json(const ann::AnnConfig& c);
Json to_json(const ann::OperatingPoint& op);

// Artifact envelope: {"tool", "version", "seed", "config", "result"}.
Json envelope(const std::string& tool, std::uint64_t seed, Json config, Json result);

// Writes indented JSON with a trailing newline. Reals are printed with
// round-trip precision, so equal values give identical bytes.
void write_json(const std::string& path, const Json& j);

// "<path>.timing.json" holding the UTC start time and wall-clock seconds.
// Timing lives beside the artifact so the artifact itself is reproducible.
void write_timing(const std::string& path, const std::string& started_utc, double seconds,
                  const Json& extra = Json::object());
std::string utc_now();

}  // namespace llsh::report

#endif  // LLSH_REPORT_H_
