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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mercury/harvester.hpp"
#include "mercury/oaipmh.hpp"

namespace mercury {

using harvest::ConfigError;

inline constexpr const char* kConfigEnvVar = "MERCURY_CONFIG";
inline constexpr std::size_t kMaxShortNameLength = 16;

/// Service configuration; see docs/formats.md for the file layout.
struct ServiceConfig {
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::string repository_name = "Mercury";
  /// OpenSearch ShortName, at most 16 characters.
  std::string short_name = "Mercury";
  /// Absolute URL the service is reachable at, without a trailing slash.
  std::string base_url = "http://localhost:8080";
  std::size_t default_page_size = 10;
  std::size_t max_page_size = 100;
  std::size_t oai_page_size = 100;
  std::string token_secret = "mercury";
  bool sets_enabled = true;
  std::vector<oai::SetInfo> collections;
  std::vector<std::string> admin_emails = {"admin@localhost"};

  std::filesystem::path store_dir = "data/store";
  std::filesystem::path snapshot_path = "data/index.snapshot";
  std::filesystem::path state_dir = "data/state";
  std::filesystem::path audit_log = "data/audit.jsonl";
  /// Empty: request log lines go to stderr.
  std::filesystem::path request_log;

  std::vector<harvest::SourceDescriptor> sources;

  oai::RepositoryConfig repository() const;
  const harvest::SourceDescriptor* source(const std::string& id) const;
};

/// Throws ConfigError. Relative paths resolve against the file's directory.
ServiceConfig load_config(const std::filesystem::path& path);
ServiceConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
/// Throws ConfigError on a bad base URL, short name or page size.
void validate(const ServiceConfig& config);

/// The explicit path if given, else $MERCURY_CONFIG, else nullopt.
std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::string>& explicit_path);

/// Creates the data directories and returns an empty string when they
/// accept writes, otherwise the reason.
std::string check_writable(const ServiceConfig& config);

}  // namespace mercury
