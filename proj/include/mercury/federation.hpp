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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mercury::federation {

/// Availability and response time of one repository in a federated search.
struct SourceStats {
  double uptime = 1.0;
  double latency_ms = 0.0;
};

class EmptyFederation : public std::invalid_argument {
 public:
  EmptyFederation() : std::invalid_argument("EmptyFederation: no sources") {}
};

class InvalidStats : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws InvalidStats unless 0 <= uptime <= 1 and latency is finite and non-negative.
void validate(const SourceStats& s);

/// Probability that every source is up, assuming independent failures.
double composite_uptime(const std::vector<SourceStats>& sources);

/// Time until the slowest source answers, plus merge time.
double federated_latency(const std::vector<SourceStats>& sources, double processing_ms);

/// Fraction of trials in which all sources were up. Deterministic for a seed.
double simulate_availability(const std::vector<SourceStats>& sources, std::uint64_t trials, std::uint64_t seed);

/// Reads a JSON array of {"uptime", "latency"} objects.
std::vector<SourceStats> stats_from_json(const nlohmann::json& j);

}  // namespace mercury::federation
