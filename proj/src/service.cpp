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

#include "mercury/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iostream>

#include "mercury/index.hpp"
#include "mercury/oaipmh.hpp"
#include "mercury/query.hpp"
#include "mercury/text.hpp"
#include "mercury/xml.hpp"

namespace mercury::service {

namespace {

using json = nlohmann::ordered_json;

constexpr std::size_t kRssLimit = 50;
constexpr const char* kXmlType = "text/xml; charset=utf-8";

/// A malformed request; becomes a 400 with a machine-readable body.
struct BadRequest {
  std::string code;
  std::string message;
  std::optional<std::size_t> position;
};

Response json_response(int status, const json& body) { return {status, "application/json", body.dump(-1, ' ', false, json::error_handler_t::replace)}; }

Response error_response(int status, std::string_view code, std::string_view message) {
  json j;
  j["error"] = code;
  j["message"] = message;
  return json_response(status, j);
}

const std::string* param(const Params& params, std::string_view name) {
  for (const auto& [k, v] : params) {
    if (k == name) return &v;
  }
  return nullptr;
}

std::size_t parse_count(const Params& params, std::string_view name, std::size_t fallback) {
  const std::string* v = param(params, name);
  if (v == nullptr || v->empty()) return fallback;
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw BadRequest{"InvalidParameter", std::string(name) + " must be a non-negative integer", std::nullopt};
  }
  return out;
}

GeoBoundingBox parse_bbox(const std::string& text) {
  auto parts = text::split(text, ',');
  if (parts.size() != 4) throw BadRequest{"InvalidBoundingBox", "bbox must be W,S,E,N", std::nullopt};
  std::array<double, 4> v{};
  for (std::size_t i = 0; i < 4; ++i) {
    auto s = text::trim(parts[i]);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v[i]);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v[i])) {
      throw BadRequest{"InvalidBoundingBox", "bbox coordinate '" + std::string(s) + "' is not a number", std::nullopt};
    }
  }
  try {
    return GeoBoundingBox::from_wsen(v[0], v[1], v[2], v[3]);
  } catch (const RecordError& e) {
    throw BadRequest{"CoordinateOutOfRange", e.what(), std::nullopt};
  }
}

std::optional<Instant> parse_param_date(const Params& params, std::string_view name) {
  const std::string* v = param(params, name);
  if (v == nullptr || v->empty()) return std::nullopt;
  auto t = parse_date(*v);
  if (!t) throw BadRequest{"InvalidDate", std::string(name) + " is not an ISO 8601 date: '" + *v + "'", std::nullopt};
  return t;
}

/// q, bbox, spatial_rel, start and end.
Query parse_search_query(const Params& params) {
  Query query;
  if (const std::string* q = param(params, "q")) {
    try {
      query.root = parse_query(*q);
    } catch (const QueryError& e) {
      throw BadRequest{std::string(to_string(e.code())), e.what(), e.position()};
    }
  }
  if (const std::string* b = param(params, "bbox"); b != nullptr && !b->empty()) {
    SpatialFilter f;
    f.box = parse_bbox(*b);
    if (const std::string* rel = param(params, "spatial_rel"); rel != nullptr && !rel->empty()) {
      auto r = spatial_relation_from_string(*rel);
      if (!r) throw BadRequest{"InvalidParameter", "spatial_rel must be intersects, contains or within", std::nullopt};
      f.relation = *r;
    }
    query.spatial = f;
  } else if (const std::string* rel = param(params, "spatial_rel"); rel != nullptr && !rel->empty()) {
    if (!spatial_relation_from_string(*rel)) {
      throw BadRequest{"InvalidParameter", "spatial_rel must be intersects, contains or within", std::nullopt};
    }
  }
  auto start = parse_param_date(params, "start");
  auto end = parse_param_date(params, "end");
  if (start && end && *start > *end) throw BadRequest{"InvalidTemporalExtent", "start is after end", std::nullopt};
  if (start || end) query.temporal = TemporalFilter{start, end};
  return query;
}

json bbox_json(const std::optional<GeoBoundingBox>& b) {
  if (!b) return nullptr;
  json j;
  j["west"] = b->west;
  j["south"] = b->south;
  j["east"] = b->east;
  j["north"] = b->north;
  return j;
}

json temporal_json(const std::optional<TemporalExtent>& t) {
  if (!t) return nullptr;
  json j;
  j["start"] = t->start ? json(format_utc(*t->start)) : json(nullptr);
  j["end"] = t->end ? json(format_utc(*t->end)) : json(nullptr);
  return j;
}

std::string url_component(std::string_view s) { return httplib::detail::encode_query_param(std::string(s)); }

std::string now_text() { return format_utc(now_utc()); }

}  // namespace

SearchService::SearchService(const ServiceConfig& config, Catalog& catalog)
    : config_(config), catalog_(catalog), repository_(config.repository()) {
  for (const auto& s : config.sources) status_[s.source_id];
}

Response SearchService::handle(std::string_view method, std::string_view path, const Params& params) const {
  bool get = method == "GET" || method == "HEAD";
  try {
    if (path == "/oai") {
      if (!get && method != "POST") return error_response(405, "MethodNotAllowed", "use GET or POST");
      return oai(params);
    }
    if (!get) return error_response(405, "MethodNotAllowed", "only GET is supported");
    if (path == "/api/search") return search(params);
    if (path.starts_with("/api/records/")) return record(path.substr(13));
    if (path == "/rss") return rss(params);
    if (path == "/opensearch.xml") return opensearch();
    if (path == "/healthz") return healthz();
    return error_response(404, "NotFound", "no such endpoint");
  } catch (const BadRequest& e) {
    json j;
    j["error"] = e.code;
    j["message"] = e.message;
    if (e.position) j["position"] = *e.position;
    return json_response(400, j);
  }
}

Response SearchService::search(const Params& params) const {
  Query query = parse_search_query(params);
  SearchOptions options;
  options.page = parse_count(params, "page", 0);
  options.page_size = parse_count(params, "size", config_.default_page_size);
  if (options.page_size == 0 || options.page_size > config_.max_page_size) {
    throw BadRequest{"InvalidParameter", "size must be between 1 and " + std::to_string(config_.max_page_size),
                     std::nullopt};
  }
  if (options.page > (std::size_t{1} << 40)) throw BadRequest{"InvalidParameter", "page is too large", std::nullopt};
  if (const std::string* f = param(params, "facets"); f != nullptr && !f->empty()) {
    for (const auto& name : text::split(*f, ',')) {
      auto trimmed = text::trim(name);
      if (trimmed.empty()) continue;
      auto facet = facet_from_string(trimmed);
      if (!facet) throw BadRequest{"UnknownFacet", "unknown facet '" + std::string(trimmed) + "'", std::nullopt};
      if (std::find(options.facets.begin(), options.facets.end(), *facet) == options.facets.end()) {
        options.facets.push_back(*facet);
      }
    }
  }

  auto index = catalog_.index();
  auto result = index->snapshot()->search(query, options);
  json body;
  body["total"] = result.total_hits;
  body["page"] = options.page;
  body["size"] = options.page_size;
  auto& hits = body["hits"] = json::array();
  for (const auto& h : result.hits) {
    const auto& r = *h.record;
    json hit;
    hit["id"] = r.identifier;
    hit["title"] = r.title;
    hit["abstract_snippet"] = h.snippet;
    hit["source"] = r.source_id;
    hit["schema"] = to_string(r.schema);
    hit["bbox"] = bbox_json(r.bbox);
    hit["temporal"] = temporal_json(r.temporal);
    hit["score"] = h.score;
    hit["data_urls"] = r.data_urls;
    hit["datestamp"] = format_utc(r.datestamp);
    hits.push_back(std::move(hit));
  }
  auto& facets = body["facets"] = json::object();
  for (const auto& [field, counts] : result.facets) {
    auto& list = facets[std::string(to_string(field))] = json::array();
    for (const auto& c : counts) list.push_back(json{{"value", c.value}, {"count", c.count}});
  }
  return json_response(200, body);
}

Response SearchService::record(std::string_view id) const {
  auto r = catalog_.store().get(id);
  if (!r) return error_response(404, "NotFound", "no record '" + std::string(id) + "'");
  if (r->deleted) {
    json j;
    j["error"] = "NotFound";
    j["message"] = "record '" + std::string(id) + "' was deleted";
    j["deleted"] = true;
    return json_response(404, j);
  }
  json j = to_json(*r);
  j.erase("raw_document");
  j["raw_document_available"] = !r->raw_document.empty();
  return json_response(200, j);
}

Response SearchService::rss(const Params& params) const {
  Query query = parse_search_query(params);
  auto snapshot = catalog_.index()->snapshot();
  std::vector<std::shared_ptr<const MetadataRecord>> records;
  for (const auto& id : snapshot->matching_identifiers(query)) {
    if (auto r = catalog_.store().get(id); r && !r->deleted) records.push_back(std::move(r));
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    if (a->datestamp != b->datestamp) return a->datestamp > b->datestamp;
    return a->identifier < b->identifier;
  });
  if (records.size() > kRssLimit) records.resize(kRssLimit);

  const std::string* q = param(params, "q");
  std::string title = config_.repository_name;
  if (q != nullptr && !text::trim(*q).empty()) title += ": " + std::string(text::trim(*q));

  xml::Writer w;
  w.open("rss", {{"version", "2.0"}});
  w.open("channel");
  w.leaf("title", title);
  w.leaf("link", config_.base_url + "/");
  w.leaf("description", "Search results from " + config_.repository_name);
  for (const auto& r : records) {
    w.open("item");
    w.leaf("title", r->title);
    w.leaf("link", config_.base_url + "/api/records/" + url_component(r->identifier));
    w.leaf("description", make_snippet(r->abstract));
    w.leaf("pubDate", format_rfc822(r->datestamp));
    w.leaf("guid", r->identifier, {{"isPermaLink", "false"}});
    w.close();
  }
  return {200, "application/rss+xml; charset=utf-8", w.str()};
}

Response SearchService::opensearch() const {
  xml::Writer w;
  w.open("OpenSearchDescription", {{"xmlns", "http://a9.com/-/spec/opensearch/1.1/"}});
  w.leaf("ShortName", config_.short_name);
  w.leaf("Description", "Search the " + config_.repository_name + " metadata catalog");
  std::string json_template = config_.base_url + "/api/search?q={searchTerms}&page={startPage?}";
  std::string rss_template = config_.base_url + "/rss?q={searchTerms}";
  w.leaf("Url", "", {{"type", "application/json"}, {"pageOffset", "0"}, {"template", json_template}}, true);
  w.leaf("Url", "", {{"type", "application/rss+xml"}, {"template", rss_template}}, true);
  w.leaf("InputEncoding", "UTF-8");
  w.leaf("OutputEncoding", "UTF-8");
  return {200, "application/opensearchdescription+xml; charset=utf-8", w.str()};
}

Response SearchService::oai(const Params& params) const {
  auto response = oai::handle_request(params, *catalog_.store().view(), repository_, now_utc());
  return {200, kXmlType, oai::serialize_response(response)};
}

Response SearchService::healthz() const {
  json body;
  bool writable = catalog_.store().writable();
  body["status"] = writable ? "ok" : "unavailable";
  body["record_count"] = catalog_.store().view()->live_count();
  auto& last = body["last_harvest"] = json::object();
  {
    std::lock_guard lock(status_mutex_);
    for (const auto& [id, s] : status_) {
      json j;
      j["last_success"] = s.last_success ? json(format_utc(*s.last_success)) : json(nullptr);
      j["last_finished"] = s.last_finished ? json(format_utc(*s.last_finished)) : json(nullptr);
      j["last_outcome"] = s.last_outcome.empty() ? json(nullptr) : json(s.last_outcome);
      last[id] = std::move(j);
    }
  }
  if (!writable) body["message"] = "record store is not writable";
  return json_response(writable ? 200 : 503, body);
}

void SearchService::record_harvest(const harvest::HarvestReport& report) {
  std::lock_guard lock(status_mutex_);
  auto& s = status_[report.source_id];
  s.last_finished = report.finished;
  s.last_outcome = std::string(to_string(report.outcome));
  if (report.outcome == harvest::Outcome::Success) s.last_success = report.finished;
}

void SearchService::record_last_success(const std::string& source_id, std::optional<Instant> when) {
  std::lock_guard lock(status_mutex_);
  status_[source_id].last_success = when;
}

void SearchService::mount(httplib::Server& server, std::ostream* request_log) {
  static thread_local std::chrono::steady_clock::time_point started;

  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    Params params;
    auto q = req.target.find('?');
    if (q != std::string::npos) params = net::parse_query(std::string_view(req.target).substr(q + 1));
    if (req.method == "POST") {
      auto body = net::parse_query(req.body);
      params.insert(params.end(), body.begin(), body.end());
    }
    auto r = handle(req.method, req.path, params);
    res.status = r.status;
    res.set_content(std::move(r.body), r.content_type);
  };

  server.set_pre_routing_handler([](const httplib::Request&, httplib::Response& res) {
    started = std::chrono::steady_clock::now();
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    return httplib::Server::HandlerResponse::Unhandled;
  });
  server.Get(R"(/.*)", route);
  server.Post(R"(/.*)", route);
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    auto r = error_response(500, "InternalError", what);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  });
  if (request_log != nullptr) {
    server.set_logger([this, request_log](const httplib::Request& req, const httplib::Response& res) {
      auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started);
      json line;
      line["time"] = now_text();
      line["method"] = req.method;
      line["path"] = req.path;
      line["query"] = req.target.find('?') == std::string::npos ? "" : req.target.substr(req.target.find('?') + 1);
      line["status"] = res.status;
      line["duration_ms"] = std::round(elapsed.count() * 1000) / 1000;
      line["remote"] = req.remote_addr;
      std::lock_guard lock(log_mutex_);
      *request_log << line.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
      request_log->flush();
    });
  }
}

harvest::HarvestReport harvest_configured(const ServiceConfig& config, Catalog& catalog,
                                          const harvest::SourceDescriptor& source,
                                          std::optional<harvest::HarvestMode> mode, net::HttpClient& http) {
  harvest::StateStore states(config.state_dir);
  auto state = states.load(source.source_id);
  auto chosen = mode.value_or(state.last_success ? harvest::HarvestMode::Incremental : harvest::HarvestMode::Full);
  harvest::HarvestEnvironment env{catalog, http, {}, now_utc, {}};
  auto result = harvest::run_harvest(source, state, chosen, env);
  states.save(result.state);
  harvest::AuditLog(config.audit_log).append(result.report);
  return result.report;
}

Runtime::Runtime(ServiceConfig config) : config_(std::move(config)) {
  if (auto why = check_writable(config_); !why.empty()) throw ConfigError(why);
  store_ = std::make_unique<RecordStore>(config_.store_dir);
  index_ = std::make_unique<Index>();
  catalog_ = std::make_unique<Catalog>(*store_, index_.get());
  load_index();
  service_ = std::make_unique<SearchService>(config_, *catalog_);
  harvest::StateStore states(config_.state_dir);
  for (const auto& s : config_.sources) service_->record_last_success(s.source_id, states.load(s.source_id).last_success);
  http_ = std::make_unique<net::HttplibClient>();
  server_ = std::make_unique<httplib::Server>();
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });
  std::ostream* log = &std::cerr;
  if (!config_.request_log.empty()) {
    if (config_.request_log.has_parent_path()) std::filesystem::create_directories(config_.request_log.parent_path());
    request_log_file_ = std::make_unique<std::ofstream>(config_.request_log, std::ios::app);
    log = request_log_file_.get();
  }
  service_->mount(*server_, log);
}

Runtime::~Runtime() {
  if (bound_ && !served_) {
    // httplib only closes a listening socket from inside its accept loop.
    std::thread drain([this] { server_->listen_after_bind(); });
    while (!server_->is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    server_->stop();
    drain.join();
  }
  stop();
  try {
    persist();
  } catch (const std::exception&) {
  }
}

void Runtime::load_index() {
  auto seq_path = config_.snapshot_path;
  seq_path += ".seq";
  std::ifstream seq_in(seq_path);
  std::uint64_t saved_seq = 0;
  if (seq_in >> saved_seq && saved_seq == store_->view()->seq() && std::filesystem::exists(config_.snapshot_path)) {
    try {
      snapshot_load(*index_, config_.snapshot_path);
      if (index_->size() == store_->view()->live_count()) return;
    } catch (const std::exception&) {
    }
  }
  catalog_->rebuild_index();
}

void Runtime::persist() {
  auto seq = store_->view()->seq();
  snapshot_save(*index_, config_.snapshot_path);
  auto seq_path = config_.snapshot_path;
  seq_path += ".seq";
  std::ofstream(seq_path, std::ios::trunc) << seq << '\n';
}

int Runtime::bind() {
  int port = config_.port == 0 ? server_->bind_to_any_port(config_.bind) : (server_->bind_to_port(config_.bind, config_.port) ? config_.port : -1);
  if (port < 0) {
    throw std::runtime_error("cannot listen on " + config_.bind + ":" + std::to_string(config_.port));
  }
  bound_ = true;
  return port;
}

void Runtime::serve(bool schedule) {
  served_ = true;
  serving_ = true;
  std::thread scheduler_thread;
  std::unique_ptr<harvest::Scheduler> scheduler;
  if (schedule && !config_.sources.empty()) {
    scheduler = std::make_unique<harvest::Scheduler>(
        config_.sources,
        [this](const harvest::SourceDescriptor& s) {
          auto report = harvest_configured(config_, *catalog_, s, std::nullopt, *http_);
          service_->record_harvest(report);
        },
        false,
        [](const std::string& id, const std::string& event) { std::cerr << "scheduler: " << id << ": " << event << '\n'; });
    scheduler_thread = std::thread([this, &scheduler] { scheduler->loop(stop_scheduler_); });
  }
  if (!stop_requested_) server_->listen_after_bind();
  serving_ = false;
  stop_scheduler_ = true;
  if (scheduler_thread.joinable()) scheduler_thread.join();
  scheduler.reset();
}

void Runtime::stop() {
  stop_requested_ = true;
  stop_scheduler_ = true;
  if (!server_) return;
  while (serving_ && !server_->is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  server_->stop();
}

}  // namespace mercury::service
