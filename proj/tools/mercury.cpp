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

// mercury: operator command line for harvesting, searching and serving.
// Exit status is 0 on success, 1 on runtime failure and 2 on usage or input
// errors.

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>

#include "mercury/crosswalk.hpp"
#include "mercury/federation.hpp"
#include "mercury/query.hpp"
#include "mercury/record_store.hpp"
#include "mercury/service.hpp"
#include "mercury/xml.hpp"

namespace {

using namespace mercury;
using json = nlohmann::json;

constexpr int kOk = 0;
constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int fail(int code, const std::string& message) {
  std::cerr << "mercury: " << message << '\n';
  return code;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), {}};
}

ServiceConfig load(const std::optional<std::string>& explicit_path) {
  auto path = resolve_config_path(explicit_path);
  if (!path) {
    throw UsageError("no configuration: pass --config or set " + std::string(kConfigEnvVar));
  }
  return load_config(*path);
}

int run_harvest(const ServiceConfig& config, const std::string& source_id, bool full) {
  const auto* source = config.source(source_id);
  if (!source) throw UsageError("unknown source '" + source_id + "'");
  service::Runtime runtime(config);
  net::HttplibClient http;
  auto mode = full ? std::optional(harvest::HarvestMode::Full) : std::nullopt;
  auto report = service::harvest_configured(config, runtime.catalog(), *source, mode, http);
  std::cout << to_json(report).dump(2) << '\n';
  return report.outcome == harvest::Outcome::Success ? kOk : kRuntimeFailure;
}

int run_search(const ServiceConfig& config, const std::string& query, const service::Params& extra, bool as_json) {
  service::Runtime runtime(config);
  service::Params params{{"q", query}};
  params.insert(params.end(), extra.begin(), extra.end());
  auto response = runtime.service().handle("GET", "/api/search", params);
  auto body = json::parse(response.body);
  if (response.status == 400) {
    std::string message = body.value("error", "") + ": " + body.value("message", "");
    if (body.contains("position")) message += " (at offset " + std::to_string(body["position"].get<std::size_t>()) + ")";
    if (as_json) std::cout << body.dump(2) << '\n';
    return fail(kUsageError, message);
  }
  if (response.status != 200) return fail(kRuntimeFailure, body.value("message", "search failed"));
  if (as_json) {
    std::cout << body.dump(2) << '\n';
    return kOk;
  }
  std::cout << body["total"].get<std::size_t>() << " hits\n";
  for (const auto& hit : body["hits"]) {
    std::printf("%8.4f  %s  %s\n", hit["score"].get<double>(), hit["id"].get<std::string>().c_str(),
                hit["title"].get<std::string>().c_str());
  }
  return kOk;
}

int run_crosswalk(const std::string& file, const std::string& source_id) {
  crosswalk::ParseContext ctx;
  ctx.fallback_id = std::filesystem::path(file).filename().string();
  auto record = crosswalk::parse_any(read_file(file), source_id, ctx);
  auto j = to_json(record);
  j.erase("raw_document");
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int run_federation(const std::string& file, double processing) {
  json parsed;
  try {
    parsed = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("malformed JSON: ") + e.what());
  }
  auto sources = federation::stats_from_json(parsed);
  json out;
  out["sources"] = sources.size();
  out["composite_uptime"] = federation::composite_uptime(sources);
  out["federated_latency_ms"] = federation::federated_latency(sources, processing);
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int run_serve(const ServiceConfig& config) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::Runtime runtime(config);
  int port = 0;
  try {
    port = runtime.bind();
  } catch (const std::runtime_error& e) {
    return fail(kRuntimeFailure, e.what());
  }
  std::cerr << "mercury: listening on " << config.bind << ':' << port << '\n';
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    runtime.stop();
  });
  runtime.serve(true);
  // Wake the waiter if serve() returned on its own.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mercury metadata harvester and search service"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "Service configuration file (default: $" + std::string(kConfigEnvVar) + ")");

  auto* harvest_cmd = app.add_subcommand("harvest", "Run one harvest of a configured source");
  std::string source_id;
  bool full = false;
  harvest_cmd->add_option("--source", source_id, "Source identifier")->required();
  harvest_cmd->add_flag("--full", full, "Re-harvest everything instead of changes since the last run");

  auto* search_cmd = app.add_subcommand("search", "Search the local catalog");
  std::string query;
  std::optional<std::string> bbox, start, end, spatial_rel, page, size;
  bool as_json = false;
  search_cmd->add_option("query", query, "Query text")->required();
  search_cmd->add_option("--bbox", bbox, "Bounding box W,S,E,N");
  search_cmd->add_option("--spatial-rel", spatial_rel, "INTERSECTS, WITHIN or CONTAINS");
  search_cmd->add_option("--start", start, "Temporal window start date");
  search_cmd->add_option("--end", end, "Temporal window end date");
  search_cmd->add_option("--page", page, "Zero-based page");
  search_cmd->add_option("--size", size, "Hits per page");
  search_cmd->add_flag("--json", as_json, "Print the API response");

  auto* crosswalk_cmd = app.add_subcommand("crosswalk", "Convert a metadata document to a unified record");
  std::string xml_file;
  std::string crosswalk_source = "local";
  crosswalk_cmd->add_option("file", xml_file, "Metadata XML document")->required();
  crosswalk_cmd->add_option("--source", crosswalk_source, "Source identifier for the record")->capture_default_str();

  auto* serve_cmd = app.add_subcommand("serve", "Run the search service and harvest scheduler");

  auto* federation_cmd = app.add_subcommand("federation", "Composite uptime and latency of a federated search");
  std::string stats_file;
  double processing = 0.0;
  federation_cmd->add_option("stats", stats_file, "JSON array of {uptime, latency}")->required();
  federation_cmd->add_option("--processing", processing, "Result merge time in milliseconds")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*harvest_cmd) return run_harvest(load(config_path), source_id, full);
    if (*search_cmd) {
      service::Params extra;
      if (bbox) extra.emplace_back("bbox", *bbox);
      if (spatial_rel) extra.emplace_back("spatial_rel", *spatial_rel);
      if (start) extra.emplace_back("start", *start);
      if (end) extra.emplace_back("end", *end);
      if (page) extra.emplace_back("page", *page);
      if (size) extra.emplace_back("size", *size);
      return run_search(load(config_path), query, extra, as_json);
    }
    if (*crosswalk_cmd) return run_crosswalk(xml_file, crosswalk_source);
    if (*serve_cmd) return run_serve(load(config_path));
    if (*federation_cmd) return run_federation(stats_file, processing);
  } catch (const UsageError& e) {
    return fail(kUsageError, e.what());
  } catch (const ConfigError& e) {
    return fail(kUsageError, e.what());
  } catch (const crosswalk::CrosswalkError& e) {
    return fail(kUsageError, std::string(crosswalk::to_string(e.code())) + ": " + e.what());
  } catch (const federation::EmptyFederation& e) {
    return fail(kUsageError, e.what());
  } catch (const federation::InvalidStats& e) {
    return fail(kUsageError, e.what());
  } catch (const std::exception& e) {
    return fail(kRuntimeFailure, e.what());
  }
  return kUsageError;
}
