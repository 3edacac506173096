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

#include "mercury/config.hpp"

#include <cstdlib>
#include <fstream>

namespace mercury {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

std::string probe_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return "cannot create " + dir.string() + ": " + ec.message();
  auto probe = dir / ".mercury-write-probe";
  {
    std::ofstream out(probe);
    out << "ok";
    if (!out) return dir.string() + " is not writable";
  }
  fs::remove(probe, ec);
  return {};
}

}  // namespace

oai::RepositoryConfig ServiceConfig::repository() const {
  oai::RepositoryConfig r;
  r.repository_name = repository_name;
  r.base_url = base_url + "/oai";
  r.admin_emails = admin_emails;
  r.page_size = oai_page_size;
  r.token_secret = token_secret;
  r.sets_enabled = sets_enabled;
  r.collections = collections;
  return r;
}

const harvest::SourceDescriptor* ServiceConfig::source(const std::string& id) const {
  for (const auto& s : sources) {
    if (s.source_id == id) return &s;
  }
  return nullptr;
}

ServiceConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  ServiceConfig c;
  try {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    c.bind = j.value("bind", c.bind);
    c.port = j.value("port", c.port);
    c.repository_name = j.value("repository_name", c.repository_name);
    c.short_name = j.value("short_name", c.short_name);
    c.base_url = j.value("base_url", c.base_url);
    while (c.base_url.ends_with('/')) c.base_url.pop_back();
    c.default_page_size = j.value("default_page_size", c.default_page_size);
    c.max_page_size = j.value("max_page_size", c.max_page_size);
    c.oai_page_size = j.value("oai_page_size", c.oai_page_size);
    c.token_secret = j.value("token_secret", c.token_secret);
    c.sets_enabled = j.value("sets_enabled", c.sets_enabled);
    if (j.contains("admin_emails")) c.admin_emails = j["admin_emails"].get<std::vector<std::string>>();
    for (const auto& col : j.value("collections", nlohmann::json::array())) {
      c.collections.push_back({col.at("spec").get<std::string>(), col.value("name", col.at("spec").get<std::string>())});
    }
    fs::path data_dir = resolve(base_dir, j.value("data_dir", std::string("data")));
    c.store_dir = j.contains("store_dir") ? resolve(base_dir, j["store_dir"].get<std::string>()) : data_dir / "store";
    c.snapshot_path = j.contains("snapshot_path") ? resolve(base_dir, j["snapshot_path"].get<std::string>())
                                                  : data_dir / "index.snapshot";
    c.state_dir = j.contains("state_dir") ? resolve(base_dir, j["state_dir"].get<std::string>()) : data_dir / "state";
    c.audit_log = j.contains("audit_log") ? resolve(base_dir, j["audit_log"].get<std::string>()) : data_dir / "audit.jsonl";
    if (j.contains("request_log")) c.request_log = resolve(base_dir, j["request_log"].get<std::string>());
    for (const auto& s : j.value("sources", nlohmann::json::array())) {
      auto source = harvest::source_from_json(s);
      if (source.kind == harvest::SourceKind::Directory) source.location = resolve(base_dir, source.location).string();
      c.sources.push_back(std::move(source));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad configuration: ") + e.what());
  }
  validate(c);
  return c;
}

void validate(const ServiceConfig& c) {
  if (!(c.base_url.starts_with("http://") || c.base_url.starts_with("https://")) ||
      c.base_url.find("://") + 3 >= c.base_url.size()) {
    throw ConfigError("base_url must be an absolute http(s) URL");
  }
  if (c.short_name.empty() || c.short_name.size() > kMaxShortNameLength) {
    throw ConfigError("short_name must be 1 to 16 characters");
  }
  if (c.port < 0 || c.port > 65535) throw ConfigError("port out of range");
  if (c.default_page_size == 0 || c.default_page_size > c.max_page_size) {
    throw ConfigError("default_page_size must be between 1 and max_page_size");
  }
  if (c.max_page_size == 0 || c.max_page_size > 1000) throw ConfigError("max_page_size must be between 1 and 1000");
  if (c.oai_page_size == 0) throw ConfigError("oai_page_size must be positive");
  harvest::validate(c.sources);
}

ServiceConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read configuration " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j, fs::absolute(path).parent_path());
}

std::optional<fs::path> resolve_config_path(const std::optional<std::string>& explicit_path) {
  if (explicit_path && !explicit_path->empty()) return fs::path(*explicit_path);
  if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') return fs::path(env);
  return std::nullopt;
}

std::string check_writable(const ServiceConfig& c) {
  for (const auto& dir : {c.store_dir, c.state_dir, c.snapshot_path.parent_path(), c.audit_log.parent_path()}) {
    if (dir.empty()) continue;
    if (auto why = probe_dir(dir); !why.empty()) return why;
  }
  return {};
}

}  // namespace mercury
