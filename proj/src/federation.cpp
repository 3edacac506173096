// Copyright 2026 The Mercury Authors
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

#include "mercury/federation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mercury::federation {

void validate(const SourceStats& s) {
  if (!(s.uptime >= 0.0 && s.uptime <= 1.0)) throw InvalidStats("uptime must lie in [0, 1]");
  if (!std::isfinite(s.latency_ms) || s.latency_ms < 0.0) throw InvalidStats("latency must be finite and non-negative");
}

double composite_uptime(const std::vector<SourceStats>& sources) {
  double product = 1.0;
  for (const auto& s : sources) {
    validate(s);
    product *= s.uptime;
  }
  return product;
}

double federated_latency(const std::vector<SourceStats>& sources, double processing_ms) {
  if (sources.empty()) throw EmptyFederation();
  if (!std::isfinite(processing_ms) || processing_ms < 0.0) throw InvalidStats("processing time must be finite and non-negative");
  double slowest = 0.0;
  for (const auto& s : sources) {
    validate(s);
    slowest = std::max(slowest, s.latency_ms);
  }
  return slowest + processing_ms;
}

double simulate_availability(const std::vector<SourceStats>& sources, std::uint64_t trials, std::uint64_t seed) {
  for (const auto& s : sources) validate(s);
  if (trials == 0) return composite_uptime(sources);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uint64_t successes = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    bool all_up = true;
    for (const auto& s : sources) {
      if (!(unit(rng) < s.uptime)) all_up = false;
    }
    if (all_up) ++successes;
  }
  return static_cast<double>(successes) / static_cast<double>(trials);
}

std::vector<SourceStats> stats_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidStats("expected a JSON array of {uptime, latency}");
  std::vector<SourceStats> out;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("uptime") || !e.contains("latency") || !e["uptime"].is_number() ||
        !e["latency"].is_number()) {
      throw InvalidStats("each entry needs numeric uptime and latency");
    }
    SourceStats s{e["uptime"].get<double>(), e["latency"].get<double>()};
    validate(s);
    out.push_back(s);
  }
  return out;
}

}  // namespace mercury::federation
