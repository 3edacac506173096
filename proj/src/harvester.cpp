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

#include "mercury/harvester.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>

#include "mercury/crosswalk.hpp"
#include "mercury/oai_client.hpp"
#include "mercury/text.hpp"
#include "mercury/time.hpp"

namespace mercury::harvest {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMaxReportedErrors = 100;

constexpr std::array<std::string_view, 3> kKindNames = {"oai-pmh", "directory", "http-listing"};

/// A provider document or deletion, before crosswalk.
struct Fetched {
  std::string local_id;
  Instant datestamp{};
  bool deleted = false;
  std::vector<std::string> sets;
  std::string document;
  std::string fetch_error;  // non-empty when the document could not be retrieved
};

using Sink = std::function<void(Fetched&&)>;

class Unavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::optional<Instant> json_instant(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  auto parsed = parse_oai_datestamp(j[key].get<std::string>());
  if (!parsed) throw ConfigError(std::string("bad instant in '") + key + "'");
  return parsed->instant;
}

nlohmann::json instant_json(const std::optional<Instant>& t) {
  return t ? nlohmann::json(format_utc(*t)) : nlohmann::json(nullptr);
}

Instant file_datestamp(const fs::path& p) {
  auto ft = fs::last_write_time(p);
  return std::chrono::floor<std::chrono::seconds>(std::chrono::file_clock::to_sys(ft));
}

void fetch_oai(const SourceDescriptor& source, const HarvestState& state, HarvestMode mode,
               HarvestEnvironment& env, const Sink& sink) {
  oai::Client client(env.http, env.retry);
  oai::ListRequest request;
  request.base_url = source.location;
  request.metadata_prefix = source.metadata_prefix.value_or("oai_dc");
  request.set = source.set;
  if (mode == HarvestMode::Incremental) request.from = state.high_watermark;
  client.list_records(request, [&](oai::HarvestedRecord&& r) {
    Fetched f;
    f.local_id = std::move(r.header.identifier);
    f.datestamp = r.header.datestamp;
    f.deleted = r.header.deleted;
    f.sets = std::move(r.header.set_specs);
    f.document = std::move(r.document);
    sink(std::move(f));
  });
}

void fetch_directory(const SourceDescriptor& source, const HarvestState& state, HarvestMode mode,
                     const Sink& sink) {
  fs::path root(source.location);
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Unavailable("not a directory: " + source.location);
  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (it->is_regular_file() && text::iequals(it->path().extension().string(), ".xml")) files.push_back(it->path());
  }
  if (ec) throw Unavailable("cannot scan " + source.location + ": " + ec.message());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    Fetched f;
    f.local_id = fs::relative(p, root).generic_string();
    f.datestamp = file_datestamp(p);
    if (mode == HarvestMode::Incremental && state.high_watermark && f.datestamp < *state.high_watermark) continue;
    std::ifstream in(p, std::ios::binary);
    if (!in) {
      f.fetch_error = "cannot read " + p.string();
    } else {
      f.document.assign(std::istreambuf_iterator<char>(in), {});
    }
    sink(std::move(f));
  }
}

std::string resolve_href(const std::string& base, const std::string& href) {
  if (href.starts_with("http://") || href.starts_with("https://")) return href;
  auto scheme_end = base.find("://");
  auto path_start = scheme_end == std::string::npos ? std::string::npos : base.find('/', scheme_end + 3);
  std::string origin = path_start == std::string::npos ? base : base.substr(0, path_start);
  if (href.starts_with('/')) return origin + href;
  std::string dir = path_start == std::string::npos ? origin + "/" : base.substr(0, base.rfind('/') + 1);
  return dir + href;
}

/// hrefs ending in .xml, resolved against the listing URL, sorted and unique.
std::vector<std::string> listing_links(const std::string& base, const std::string& html) {
  static const std::regex kHref(R"(href\s*=\s*["']([^"'#?]+\.xml)["'])", std::regex::icase);
  std::set<std::string> links;
  for (auto it = std::sregex_iterator(html.begin(), html.end(), kHref); it != std::sregex_iterator(); ++it) {
    links.insert(resolve_href(base, (*it)[1].str()));
  }
  return {links.begin(), links.end()};
}

void fetch_listing(const SourceDescriptor& source, const HarvestState& state, HarvestMode mode,
                   HarvestEnvironment& env, const Sink& sink) {
  auto listing = net::fetch_with_retry(env.http, source.location, env.retry);
  if (listing.status != 200) {
    throw Unavailable("listing " + source.location + " returned HTTP " + std::to_string(listing.status));
  }
  std::string dir = resolve_href(source.location, "");
  for (const auto& url : listing_links(source.location, listing.body)) {
    Fetched f;
    f.local_id = url.starts_with(dir) ? url.substr(dir.size()) : url;
    f.datestamp = env.clock();
    try {
      auto r = net::fetch_with_retry(env.http, url, env.retry);
      if (r.status != 200) {
        f.fetch_error = url + " returned HTTP " + std::to_string(r.status);
      } else {
        if (const auto* lm = r.header("last-modified")) {
          if (auto t = parse_http_date(*lm)) f.datestamp = *t;
        }
        f.document = std::move(r.body);
      }
    } catch (const net::TransportError& e) {
      f.fetch_error = e.what();
    }
    if (mode == HarvestMode::Incremental && state.high_watermark && f.fetch_error.empty() &&
        f.datestamp < *state.high_watermark) {
      continue;
    }
    sink(std::move(f));
  }
}

std::string safe_file_name(const std::string& id) {
  std::string out;
  for (char c : id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  if (out.empty() || out.front() == '.') out.insert(out.begin(), '_');
  return out;
}

}  // namespace

std::string_view to_string(SourceKind kind) noexcept { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<SourceKind> source_kind_from_string(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<SourceKind>(i);
  }
  return std::nullopt;
}

void validate(const SourceDescriptor& source) {
  if (source.source_id.empty()) throw ConfigError("source has an empty id");
  if (source.source_id.find_first_of(" \t\r\n") != std::string::npos) {
    throw ConfigError("source id '" + source.source_id + "' contains whitespace");
  }
  if (source.location.empty()) throw ConfigError("source '" + source.source_id + "' has no location");
  if (source.interval < kMinInterval) {
    throw ConfigError("source '" + source.source_id + "' interval is under one minute");
  }
}

void validate(const std::vector<SourceDescriptor>& sources) {
  std::set<std::string> ids;
  for (const auto& s : sources) {
    validate(s);
    if (!ids.insert(s.source_id).second) throw ConfigError("duplicate source id '" + s.source_id + "'");
  }
}

SourceDescriptor source_from_json(const nlohmann::json& j) {
  try {
    SourceDescriptor s;
    s.source_id = j.at("id").get<std::string>();
    auto kind = source_kind_from_string(j.value("kind", "oai-pmh"));
    if (!kind) throw ConfigError("source '" + s.source_id + "' has unknown kind");
    s.kind = *kind;
    s.location = j.at("location").get<std::string>();
    if (j.contains("metadata_prefix")) s.metadata_prefix = j["metadata_prefix"].get<std::string>();
    if (j.contains("set")) s.set = j["set"].get<std::string>();
    s.interval = std::chrono::seconds(static_cast<std::int64_t>(j.value("interval_minutes", 60.0) * 60));
    s.enabled = j.value("enabled", true);
    validate(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad source entry: ") + e.what());
  }
}

nlohmann::ordered_json to_json(const SourceDescriptor& s) {
  nlohmann::ordered_json j;
  j["id"] = s.source_id;
  j["kind"] = to_string(s.kind);
  j["location"] = s.location;
  if (s.metadata_prefix) j["metadata_prefix"] = *s.metadata_prefix;
  if (s.set) j["set"] = *s.set;
  j["interval_minutes"] = static_cast<double>(s.interval.count()) / 60.0;
  j["enabled"] = s.enabled;
  return j;
}

nlohmann::ordered_json to_json(const HarvestState& s) {
  nlohmann::ordered_json j;
  j["source_id"] = s.source_id;
  j["last_success"] = instant_json(s.last_success);
  j["high_watermark"] = instant_json(s.high_watermark);
  j["consecutive_failures"] = s.consecutive_failures;
  auto& known = j["known"] = nlohmann::ordered_json::object();
  for (const auto& [id, fp] : s.known) known[id] = fp.hex();
  return j;
}

HarvestState state_from_json(const nlohmann::json& j) {
  try {
    HarvestState s;
    s.source_id = j.at("source_id").get<std::string>();
    s.last_success = json_instant(j, "last_success");
    s.high_watermark = json_instant(j, "high_watermark");
    s.consecutive_failures = j.value("consecutive_failures", std::size_t{0});
    for (const auto& [id, hex] : j.at("known").items()) {
      auto fp = Fingerprint::from_hex(hex.get<std::string>());
      if (!fp) throw ConfigError("bad fingerprint for '" + id + "'");
      s.known.emplace(id, *fp);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad harvest state: ") + e.what());
  }
}

StateStore::StateStore(fs::path directory) : directory_(std::move(directory)) {}

fs::path StateStore::path_for(const std::string& source_id) const {
  return directory_ / (safe_file_name(source_id) + ".json");
}

HarvestState StateStore::load(const std::string& source_id) const {
  auto p = path_for(source_id);
  std::ifstream in(p, std::ios::binary);
  if (!in) return HarvestState{source_id, {}, {}, {}, 0};
  try {
    auto state = state_from_json(nlohmann::json::parse(in));
    if (state.source_id != source_id) throw ConfigError(p.string() + " belongs to another source");
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

void StateStore::save(const HarvestState& state) const {
  fs::create_directories(directory_);
  auto target = path_for(state.source_id);
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << to_json(state).dump(2) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string_view to_string(HarvestMode mode) noexcept {
  return mode == HarvestMode::Full ? "full" : "incremental";
}

std::string_view to_string(Outcome outcome) noexcept {
  return outcome == Outcome::Success ? "success" : "source_unavailable";
}

nlohmann::ordered_json to_json(const HarvestReport& r) {
  nlohmann::ordered_json j;
  j["source_id"] = r.source_id;
  j["mode"] = to_string(r.mode);
  j["outcome"] = to_string(r.outcome);
  j["started"] = format_utc(r.started);
  j["finished"] = format_utc(r.finished);
  j["fetched"] = r.counts.fetched;
  j["added"] = r.counts.added;
  j["updated"] = r.counts.updated;
  j["unchanged"] = r.counts.unchanged;
  j["deleted"] = r.counts.deleted;
  j["failed"] = r.counts.failed;
  j["purged"] = r.counts.purged;
  j["watermark_advanced"] = r.watermark_advanced;
  j["errors"] = r.errors;
  return j;
}

HarvestResult run_harvest(const SourceDescriptor& source, const HarvestState& state, HarvestMode mode,
                          HarvestEnvironment& env) {
  HarvestResult result{{}, state};
  HarvestReport& report = result.report;
  HarvestState& next = result.state;
  next.source_id = source.source_id;
  report.source_id = source.source_id;
  report.mode = mode;
  report.started = env.clock();

  auto note = [&](std::string message) {
    if (report.errors.size() < kMaxReportedErrors) report.errors.push_back(std::move(message));
  };

  std::set<std::string> seen;
  std::optional<Instant> newest;
  std::size_t position = 0;

  auto apply = [&](Fetched&& f) {
    if (env.before_record) env.before_record(position);
    ++position;
    ++report.counts.fetched;
    std::string id = qualify_identifier(source.source_id, f.local_id);
    seen.insert(id);
    if (!newest || f.datestamp > *newest) newest = f.datestamp;

    if (!f.fetch_error.empty()) {
      ++report.counts.failed;
      note(id + ": " + f.fetch_error);
      return;
    }
    if (f.deleted) {
      ++report.counts.deleted;
      env.catalog.remove(id, f.datestamp);
      next.known.erase(id);
      return;
    }
    try {
      crosswalk::ParseContext ctx;
      ctx.local_id = f.local_id;
      ctx.datestamp = f.datestamp;
      ctx.sets = std::move(f.sets);
      auto record = crosswalk::parse_any(f.document, source.source_id, ctx);
      auto fp = fingerprint(record);
      auto known = next.known.find(record.identifier);
      auto existing = env.catalog.store().get(record.identifier);
      bool live = existing && !existing->deleted;
      if (known == next.known.end()) {
        ++report.counts.added;
      } else if (known->second != fp) {
        ++report.counts.updated;
      } else {
        ++report.counts.unchanged;
        if (live) return;
      }
      std::string stored_id = record.identifier;
      env.catalog.apply(std::move(record));
      next.known[stored_id] = fp;
    } catch (const crosswalk::CrosswalkError& e) {
      ++report.counts.failed;
      note(id + ": " + std::string(to_string(e.code())) + ": " + e.what());
    } catch (const RecordError& e) {
      ++report.counts.failed;
      note(id + ": " + e.what());
    }
  };

  try {
    switch (source.kind) {
      case SourceKind::OaiPmh: fetch_oai(source, state, mode, env, apply); break;
      case SourceKind::Directory: fetch_directory(source, state, mode, apply); break;
      case SourceKind::HttpListing: fetch_listing(source, state, mode, env, apply); break;
    }
  } catch (const Unavailable& e) {
    report.outcome = Outcome::SourceUnavailable;
    note(e.what());
  } catch (const net::TransportError& e) {
    report.outcome = Outcome::SourceUnavailable;
    note(e.what());
  } catch (const oai::ProtocolError& e) {
    report.outcome = Outcome::SourceUnavailable;
    note(e.what());
  } catch (const oai::MalformedResponse& e) {
    report.outcome = Outcome::SourceUnavailable;
    note(e.what());
  }

  if (report.outcome == Outcome::SourceUnavailable) {
    ++next.consecutive_failures;
    report.finished = env.clock();
    return result;
  }

  if (mode == HarvestMode::Full) {
    auto view = env.catalog.store().view();
    Instant now = env.clock();
    for (const auto& [id, entry] : view->entries()) {
      const auto& r = *entry.record;
      if (r.deleted || r.source_id != source.source_id || seen.count(id) > 0) continue;
      if (env.catalog.remove(id, now)) ++report.counts.purged;
    }
    for (auto it = next.known.begin(); it != next.known.end();) {
      it = seen.count(it->first) > 0 ? std::next(it) : next.known.erase(it);
    }
  }

  bool mostly_failed = report.counts.failed * 2 > report.counts.fetched;
  if (!mostly_failed && newest && (!next.high_watermark || *newest > *next.high_watermark)) {
    next.high_watermark = newest;
    report.watermark_advanced = true;
  }
  if (mostly_failed) note("more than half of the fetched records failed; high watermark kept");
  next.consecutive_failures = 0;
  report.finished = env.clock();
  next.last_success = report.finished;
  return result;
}

void AuditLog::append(const HarvestReport& report) {
  std::lock_guard lock(mutex_);
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  out << to_json(report).dump() << '\n';
  if (!out) throw std::runtime_error("cannot append to " + path_.string());
}

Scheduler::Scheduler(std::vector<SourceDescriptor> sources, Runner runner, bool run_inline, Logger logger)
    : runner_(std::move(runner)), run_inline_(run_inline), logger_(std::move(logger)) {
  for (auto& s : sources) slots_.push_back({std::move(s), std::nullopt, false, {}});
}

Scheduler::~Scheduler() {
  wait_idle();
  for (auto& slot : slots_) {
    if (slot.thread.joinable()) slot.thread.join();
  }
}

std::vector<std::string> Scheduler::tick(Instant now) {
  std::vector<std::string> started;
  std::vector<std::size_t> to_run;
  {
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      Slot& slot = slots_[i];
      if (!slot.source.enabled) continue;
      if (slot.next_due && now < *slot.next_due) continue;
      if (slot.running) {
        if (logger_) logger_(slot.source.source_id, "skipped: previous run still in progress");
        slot.next_due = now + slot.source.interval;
        continue;
      }
      slot.running = true;
      slot.next_due = now + slot.source.interval;
      ++in_flight_;
      started.push_back(slot.source.source_id);
      to_run.push_back(i);
    }
  }

  for (std::size_t i : to_run) {
    auto body = [this, i] {
      try {
        runner_(slots_[i].source);
      } catch (const std::exception& e) {
        if (logger_) logger_(slots_[i].source.source_id, std::string("run failed: ") + e.what());
      }
      std::lock_guard lock(mutex_);
      slots_[i].running = false;
      --in_flight_;
      idle_.notify_all();
    };
    if (run_inline_) {
      body();
    } else {
      // The previous run of this slot has finished; its thread only needs joining.
      if (slots_[i].thread.joinable()) slots_[i].thread.join();
      slots_[i].thread = std::thread(body);
    }
  }
  return started;
}

void Scheduler::wait_idle() {
  std::unique_lock lock(mutex_);
  idle_.wait(lock, [this] { return in_flight_ == 0; });
}

bool Scheduler::running(const std::string& source_id) const {
  std::lock_guard lock(mutex_);
  for (const auto& s : slots_) {
    if (s.source.source_id == source_id) return s.running;
  }
  return false;
}

void Scheduler::loop(const std::atomic<bool>& stop) {
  while (!stop.load()) {
    tick(now_utc());
    for (int i = 0; i < 10 && !stop.load(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
}

}  // namespace mercury::harvest
