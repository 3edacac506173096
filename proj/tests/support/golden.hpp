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

// Golden crosswalk fixtures: fixtures/{schema}/{name}.xml beside
// {name}.expected.json.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mercury/crosswalk.hpp"

namespace mercury::testing {

struct GoldenCase {
  std::string schema_dir;
  std::string name;
  std::filesystem::path xml_path;
  std::filesystem::path expected_path;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

inline std::vector<GoldenCase> golden_cases(const std::filesystem::path& root) {
  std::vector<GoldenCase> out;
  for (const auto& dir : std::filesystem::directory_iterator(root)) {
    if (!dir.is_directory()) continue;
    for (const auto& f : std::filesystem::directory_iterator(dir.path())) {
      if (f.path().extension() != ".xml") continue;
      auto stem = f.path().stem().string();
      out.push_back({dir.path().filename().string(), stem, f.path(),
                     dir.path() / (stem + ".expected.json")});
    }
  }
  std::sort(out.begin(), out.end(), [](const GoldenCase& a, const GoldenCase& b) {
    return a.xml_path < b.xml_path;
  });
  return out;
}

/// Parses a fixture the way the checked-in expectations were produced:
/// source "local", file name as fallback identifier.
inline MetadataRecord parse_golden(const GoldenCase& c) {
  crosswalk::ParseContext ctx;
  ctx.fallback_id = c.xml_path.filename().string();
  return crosswalk::parse_any(read_file(c.xml_path), "local", ctx);
}

/// Record JSON without the raw document, which fixtures do not repeat.
inline nlohmann::json comparable_json(const MetadataRecord& r) {
  nlohmann::json j = nlohmann::json::parse(to_json(r).dump());
  j.erase("raw_document");
  return j;
}

}  // namespace mercury::testing
