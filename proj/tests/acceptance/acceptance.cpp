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

// Acceptance checks for the harvesting, indexing and search service. Prints
// one PASS or FAIL line per criterion and exits non-zero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fake_provider.hpp"
#include "generators.hpp"
#include "golden.hpp"
#include "mercury/catalog.hpp"
#include "mercury/federation.hpp"
#include "mercury/harvester.hpp"
#include "mercury/index.hpp"
#include "mercury/oaipmh.hpp"
#include "mercury/service.hpp"
#include "mercury/xml.hpp"
#include "search_oracle.hpp"
#include "temp_dir.hpp"

using namespace mercury;
using Clock = std::chrono::steady_clock;
using mercury::testing::TempDir;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (failures.size() < 5) failures.push_back(what);
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

// 1. OAI-PMH conformance -----------------------------------------------------

struct OaiCase {
  oai::Params params;
  std::optional<oai::ErrorCode> error;  // nullopt: a successful response
  bool sets_enabled = true;
};

Verdict oai_conformance() {
  Verdict v;
  auto start = Clock::now();
  const Instant now = parse_oai_datestamp("2024-06-01T12:00:00Z")->instant;
  RecordStore store;
  std::mt19937_64 rng(101);
  std::vector<MetadataRecord> records;
  for (int i = 0; i < 25; ++i) {
    records.push_back(testing::random_oai_dc_record(rng, i, i % 2 == 0 ? "ornl" : "lter"));
    store.put(records.back());
  }
  auto cases_on_disk = testing::golden_cases(MERCURY_FIXTURES_DIR);
  auto fgdc = std::find_if(cases_on_disk.begin(), cases_on_disk.end(), [](const auto& c) { return c.schema_dir == "fgdc"; });
  auto native = testing::parse_golden(*fgdc);
  store.put(native);
  const std::string live = records[1].identifier;
  const std::string gone = records[0].identifier;
  store.put(make_tombstone(records[0], now - std::chrono::hours(1)));

  oai::RepositoryConfig config;
  config.page_size = 10;
  auto request = [&](const oai::Params& p, bool sets, Instant at) {
    auto c = config;
    c.sets_enabled = sets;
    return oai::handle_request(p, *store.view(), c, at);
  };
  auto first_token = [&](const char* verb, const oai::Params& extra) {
    oai::Params p{{"verb", verb}};
    p.insert(p.end(), extra.begin(), extra.end());
    auto r = request(p, true, now);
    if (auto* l = std::get_if<oai::RecordList>(&r.payload)) return l->token ? l->token->value : std::string();
    if (auto* h = std::get_if<oai::HeaderList>(&r.payload)) return h->token ? h->token->value : std::string();
    return std::string();
  };
  const std::string records_token = first_token("ListRecords", {{"metadataPrefix", "oai_dc"}});
  const std::string ids_token = first_token("ListIdentifiers", {{"metadataPrefix", "oai_dc"}});
  v.expect(!records_token.empty() && !ids_token.empty(), "list verbs paginate 26 records at page size 10");

  using E = oai::ErrorCode;
  const std::vector<OaiCase> cases = {
      // Identify
      {{{"verb", "Identify"}}, {}},
      {{{"verb", "Identify"}, {"metadataPrefix", "oai_dc"}}, E::badArgument},
      {{{"verb", "Identify"}, {"verb", "Identify"}}, E::badVerb},
      // ListMetadataFormats
      {{{"verb", "ListMetadataFormats"}}, {}},
      {{{"verb", "ListMetadataFormats"}, {"identifier", live}}, {}},
      {{{"verb", "ListMetadataFormats"}, {"identifier", "nope:1"}}, E::idDoesNotExist},
      {{{"verb", "ListMetadataFormats"}, {"identifier", gone}}, E::noMetadataFormats},
      {{{"verb", "ListMetadataFormats"}, {"set", "ornl"}}, E::badArgument},
      {{{"verb", "ListMetadataFormats"}, {"identifier", live}, {"identifier", live}}, E::badArgument},
      // ListSets
      {{{"verb", "ListSets"}}, {}},
      {{{"verb", "ListSets"}}, E::noSetHierarchy, false},
      {{{"verb", "ListSets"}, {"resumptionToken", "junk"}}, E::badResumptionToken},
      {{{"verb", "ListSets"}, {"metadataPrefix", "oai_dc"}}, E::badArgument},
      // ListIdentifiers
      {{{"verb", "ListIdentifiers"}, {"metadataPrefix", "oai_dc"}}, {}},
      {{{"verb", "ListIdentifiers"}, {"metadataPrefix", "oai_dc"}, {"set", "ornl"}}, {}},
      {{{"verb", "ListIdentifiers"}, {"metadataPrefix", "oai_dc"}, {"from", "2000-01-01"}, {"until", "2030-01-01"}}, {}},
      {{{"verb", "ListIdentifiers"}, {"resumptionToken", ids_token}}, {}},
      {{{"verb", "ListIdentifiers"}}, E::badArgument},
      {{{"verb", "ListIdentifiers"}, {"metadataPrefix", "oai_dc"}, {"identifier", live}}, E::badArgument},
      {{{"verb", "ListIdentifiers"}, {"metadataPrefix", "oai_dc"}, {"from", "yesterday"}}, E::badArgument},
      {{{"verb", "ListIdentifiers"}, {"metadataPrefix", "oai_dc"}, {"resumptionToken", ids_token}}, E::badArgument},
      {{{"verb", "ListIdentifiers"}, {"resumptionToken", records_token}}, E::badResumptionToken},
      {{{"verb", "ListIdentifiers"}, {"metadataPrefix", "marc21"}}, E::cannotDisseminateFormat},
      {{{"verb", "ListIdentifiers"}, {"metadataPrefix", "oai_dc"}, {"set", "nowhere"}}, E::noRecordsMatch},
      {{{"verb", "ListIdentifiers"}, {"metadataPrefix", "oai_dc"}, {"set", "ornl"}}, E::noSetHierarchy, false},
      // ListRecords
      {{{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}}, {}},
      {{{"verb", "ListRecords"}, {"metadataPrefix", "fgdc"}}, {}},
      {{{"verb", "ListRecords"}, {"resumptionToken", records_token}}, {}},
      {{{"verb", "ListRecords"}}, E::badArgument},
      {{{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}, {"metadataPrefix", "oai_dc"}}, E::badArgument},
      {{{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}, {"from", "2001-01-01"}, {"until", "2002-01-01T00:00:00Z"}},
       E::badArgument},
      {{{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}, {"from", "2002-01-01"}, {"until", "2001-01-01"}},
       E::badArgument},
      {{{"verb", "ListRecords"}, {"resumptionToken", "not-a-token"}}, E::badResumptionToken},
      {{{"verb", "ListRecords"}, {"metadataPrefix", "marc21"}}, E::cannotDisseminateFormat},
      {{{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}, {"from", "2090-01-01"}}, E::noRecordsMatch},
      // GetRecord
      {{{"verb", "GetRecord"}, {"identifier", live}, {"metadataPrefix", "oai_dc"}}, {}},
      {{{"verb", "GetRecord"}, {"identifier", gone}, {"metadataPrefix", "oai_dc"}}, {}},
      {{{"verb", "GetRecord"}, {"identifier", native.identifier}, {"metadataPrefix", "fgdc"}}, {}},
      {{{"verb", "GetRecord"}, {"identifier", live}}, E::badArgument},
      {{{"verb", "GetRecord"}, {"metadataPrefix", "oai_dc"}}, E::badArgument},
      {{{"verb", "GetRecord"}, {"identifier", live}, {"metadataPrefix", "oai_dc"}, {"from", "2001-01-01"}}, E::badArgument},
      {{{"verb", "GetRecord"}, {"identifier", live}, {"metadataPrefix", "eml"}}, E::cannotDisseminateFormat},
      {{{"verb", "GetRecord"}, {"identifier", "nope:1"}, {"metadataPrefix", "oai_dc"}}, E::idDoesNotExist},
      // Verb errors
      {{}, E::badVerb},
      {{{"verb", "Harvest"}}, E::badVerb},
      {{{"verb", "listrecords"}, {"metadataPrefix", "oai_dc"}}, E::badVerb},
  };

  std::set<E> seen;
  std::set<std::string> verbs_ok, verbs_bad;
  std::size_t assertions = 0;
  auto check = [&](bool ok, const std::string& what) {
    ++assertions;
    v.expect(ok, what);
  };
  for (const auto& c : cases) {
    std::string label;
    for (const auto& [k, val] : c.params) label += k + "=" + val.substr(0, 24) + "&";
    auto response = request(c.params, c.sets_enabled, now);
    auto doc = xml::parse(oai::serialize_response(response));
    check(doc.local == "OAI-PMH" && doc.ns == oai::kOaiNamespace, label + " root element");
    const auto* date = doc.child("responseDate");
    check(date && date->text == format_utc(now), label + " responseDate");
    const auto* echo = doc.child("request");
    check(echo && echo->text == config.base_url, label + " request URL");
    auto verb_param = std::find_if(c.params.begin(), c.params.end(), [](const auto& p) { return p.first == "verb"; });
    std::string verb = verb_param == c.params.end() ? "" : verb_param->second;
    if (c.error) {
      seen.insert(*c.error);
      verbs_bad.insert(verb);
      check(response.is_error() && response.errors().front().code == *c.error,
            label + " expected " + std::string(oai::to_string(*c.error)));
      const auto* err = doc.child("error");
      check(err && err->attribute("code") && *err->attribute("code") == oai::to_string(*c.error), label + " error element");
      bool bare = *c.error == E::badVerb || *c.error == E::badArgument;
      check(echo && (bare ? echo->attributes.empty() : !echo->attributes.empty()), label + " request echo attributes");
      check(!verb.empty() ? doc.child(verb) == nullptr : true, label + " no verb element beside an error");
    } else {
      verbs_ok.insert(verb);
      check(!response.is_error(), label + " unexpected error");
      check(doc.child(verb) != nullptr, label + " verb element");
      check(echo && echo->attribute("verb") && *echo->attribute("verb") == verb, label + " echoed verb");
    }
  }

  // Every page of both list verbs is reachable and complete.
  for (const char* verb : {"ListIdentifiers", "ListRecords"}) {
    oai::Params p{{"verb", verb}, {"metadataPrefix", "oai_dc"}};
    std::set<std::string> ids;
    std::size_t pages = 0;
    for (;;) {
      auto doc = xml::parse(oai::serialize_response(request(p, true, now)));
      ++pages;
      for (const auto* h : doc.find_all(std::string(verb) + (verb == std::string("ListRecords") ? "/record/header" : "/header"))) {
        ids.insert(h->child("identifier")->text);
      }
      const auto* token = doc.find(std::string(verb) + "/resumptionToken");
      if (!token || token->text.empty()) break;
      p = {{"verb", verb}, {"resumptionToken", token->text}};
    }
    check(ids.size() == 26 && pages == 3, std::string(verb) + " chain covers every record once");
  }

  check(seen.size() == 8, "all eight error codes reached");
  check(verbs_ok.size() == 6, "all six verbs answered");
  double elapsed = seconds_since(start);
  check(elapsed < 10.0, "runtime under 10 s");
  v.detail = std::to_string(cases.size()) + " requests, " + std::to_string(assertions) + " assertions, " +
             std::to_string(seen.size()) + "/8 error codes, " + std::to_string(verbs_ok.size()) + "/6 verbs, " +
             fixed(elapsed, 2) + " s (limit 10 s)";
  return v;
}

// 2 and 3. Harvesting from a live service ------------------------------------

std::multiset<std::string> live_prints(const StoreView& view) {
  std::multiset<std::string> out;
  for (const auto& [id, e] : view.entries()) {
    if (!e.record->deleted) out.insert(fingerprint(*e.record).hex());
  }
  return out;
}

/// A data provider listening on an ephemeral port in this process.
struct LiveProvider {
  TempDir dir;
  std::unique_ptr<service::Runtime> runtime;
  std::thread thread;
  std::string oai_url;

  LiveProvider(int records, std::size_t page_size, std::uint64_t seed) {
    ServiceConfig c;
    c.port = 0;
    c.bind = "127.0.0.1";
    c.oai_page_size = page_size;
    c.store_dir = dir / "store";
    c.snapshot_path = dir / "index.snapshot";
    c.state_dir = dir / "state";
    c.audit_log = dir / "audit.jsonl";
    c.request_log = dir / "requests.jsonl";
    runtime = std::make_unique<service::Runtime>(c);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < records; ++i) runtime->catalog().apply(testing::random_oai_dc_record(rng, i, "prov"));
    int port = runtime->bind();
    oai_url = "http://127.0.0.1:" + std::to_string(port) + "/oai";
    thread = std::thread([this] { runtime->serve(false); });
  }
  ~LiveProvider() {
    runtime->stop();
    thread.join();
  }
  const RecordStore& store() { return runtime->catalog().store(); }
};

harvest::SourceDescriptor live_source(const std::string& url) {
  harvest::SourceDescriptor s;
  s.source_id = "prov";
  s.kind = harvest::SourceKind::OaiPmh;
  s.location = url;
  return s;
}

std::size_t count_occurrences(const std::string& body, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = body.find(needle); pos != std::string::npos; pos = body.find(needle, pos + 1)) ++n;
  return n;
}

std::vector<std::string> wire_identifiers(const net::WireLog& wire) {
  std::vector<std::string> ids;
  for (const auto& e : wire.entries()) {
    if (e.url.find("ListRecords") == std::string::npos) continue;
    auto doc = xml::parse(e.body);
    for (const auto* h : doc.find_all("ListRecords/record/header")) ids.push_back(h->child("identifier")->text);
  }
  return ids;
}

Verdict self_harvest() {
  Verdict v;
  auto start = Clock::now();
  LiveProvider provider(500, 37, 202);
  RecordStore store;
  Index index;
  Catalog catalog(store, &index);
  net::HttplibClient http(std::chrono::seconds(10));
  net::WireLog wire;
  net::LoggingClient logged(http, wire, true);
  harvest::HarvestEnvironment env{catalog, logged, {}, now_utc, {}};
  auto result = harvest::run_harvest(live_source(provider.oai_url), {"prov", {}, {}, {}, 0}, harvest::HarvestMode::Full, env);

  auto ids = wire_identifiers(wire);
  std::set<std::string> unique(ids.begin(), ids.end());
  auto served = live_prints(*provider.store().view());
  auto local = live_prints(*store.view());
  auto indexed = index.snapshot()->matching_identifiers(Query{});
  std::size_t pages = 0;
  for (const auto& e : wire.entries()) pages += e.url.find("ListRecords") != std::string::npos;

  v.expect(result.report.outcome == harvest::Outcome::Success, "harvest succeeded");
  v.expect(ids.size() == 500, "500 records on the wire");
  v.expect(unique.size() == ids.size(), "no duplicate identifiers on the wire");
  v.expect(result.report.counts.added == 500, "500 records added");
  v.expect(served == local, "fingerprint multisets equal");
  v.expect(indexed.size() == 500 && std::set<std::string>(indexed.begin(), indexed.end()).size() == 500,
           "index holds each record once");
  v.expect(pages == 14, "ceil(500/37) = 14 pages");
  double elapsed = seconds_since(start);
  v.expect(elapsed < 30.0, "runtime under 30 s");
  v.detail = std::to_string(ids.size()) + " records in " + std::to_string(pages) + " pages of 37, " +
             std::to_string(ids.size() - unique.size()) + " duplicates, fingerprints " +
             (served == local ? "equal" : "differ") + ", " + fixed(elapsed, 2) + " s (limit 30 s)";
  return v;
}

Verdict incremental_efficiency() {
  Verdict v;
  LiveProvider provider(500, 37, 303);
  RecordStore store;
  Catalog catalog(store);
  net::HttplibClient http(std::chrono::seconds(10));
  net::WireLog wire;
  net::LoggingClient logged(http, wire, true);
  harvest::HarvestEnvironment env{catalog, logged, {}, now_utc, {}};
  auto source = live_source(provider.oai_url);
  auto full = harvest::run_harvest(source, {"prov", {}, {}, {}, 0}, harvest::HarvestMode::Full, env);
  v.expect(full.report.counts.added == 500, "initial full harvest");

  auto view = provider.store().view();
  Instant latest{};
  for (const auto& [id, e] : view->entries()) latest = std::max(latest, e.record->datestamp);
  std::mt19937_64 rng(7);
  std::vector<std::string> all;
  for (const auto& [id, e] : view->entries()) all.push_back(id);
  std::shuffle(all.begin(), all.end(), rng);
  for (int i = 0; i < 7; ++i) {
    auto r = *provider.store().get(all[static_cast<std::size_t>(i)]);
    r.title += " amended " + std::to_string(i);
    r.datestamp = latest + std::chrono::minutes(10 + i);
    r.raw_document = crosswalk::to_oai_dc(r);
    provider.runtime->catalog().apply(r);
  }
  // Unchanged records stamped exactly at the previous high-water mark are
  // legitimately re-sent by an inclusive from.
  std::size_t boundary = 0;
  for (const auto& [id, e] : provider.store().view()->entries()) boundary += e.record->datestamp == latest;

  wire.clear();
  auto inc = harvest::run_harvest(source, full.state, harvest::HarvestMode::Incremental, env);
  std::size_t chains = 0, pages = 0, on_wire = 0;
  for (const auto& e : wire.entries()) {
    if (e.url.find("verb=ListRecords") != std::string::npos) {
      ++pages;
      chains += e.url.find("resumptionToken") == std::string::npos;
    }
    on_wire += count_occurrences(e.body, "<record>");
  }
  v.expect(chains == 1, "exactly one ListRecords chain");
  v.expect(on_wire <= 7 + boundary, "records on the wire bounded by 7 plus boundary overlap");
  v.expect(inc.report.counts.updated == 7, "report shows updated = 7");
  v.expect(live_prints(*store.view()) == live_prints(*provider.store().view()), "local store matches provider");
  v.detail = std::to_string(chains) + " ListRecords chain (" + std::to_string(pages) + " page), " + std::to_string(on_wire) +
             " records on the wire (bound " + std::to_string(7 + boundary) + "), updated = " +
             std::to_string(inc.report.counts.updated) + " of 500";
  return v;
}

// 4. Search against an independent oracle -----------------------------------

Verdict search_oracle() {
  Verdict v;
  std::mt19937_64 rng(404);
  std::vector<MetadataRecord> records;
  for (int i = 0; i < 2000; ++i) records.push_back(testing::random_record(rng, i));
  Index index;
  std::vector<std::shared_ptr<const MetadataRecord>> batch;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i < 500) {
      index.upsert(records[i]);
    } else {
      batch.push_back(std::make_shared<MetadataRecord>(records[i]));
    }
  }
  index.upsert_batch(batch);
  testing::SearchOracle oracle(records);
  testing::QueryGenerator gen(rng, records);
  auto snap = index.snapshot();
  std::size_t set_matches = 0, score_checks = 0, spatial = 0, temporal = 0;
  double worst = 0;
  for (int q = 0; q < 500; ++q) {
    auto query = gen.query();
    spatial += query.spatial.has_value();
    temporal += query.temporal.has_value();
    auto expected = oracle.run(query);
    auto got_ids = snap->matching_identifiers(query);
    std::vector<std::string> want_ids;
    for (const auto& h : expected.hits) want_ids.push_back(h.identifier);
    std::sort(want_ids.begin(), want_ids.end());
    if (got_ids == want_ids) ++set_matches;
    else v.expect(false, "hit set differs for " + to_string(query.root));

    std::map<std::string, double> want_score;
    for (const auto& h : expected.hits) want_score[h.identifier] = h.score;
    for (std::size_t page = 0; page * kMaxPageSize < expected.hits.size(); ++page) {
      auto got = snap->search(query, {page, kMaxPageSize, {}});
      for (const auto& h : got.hits) {
        auto it = want_score.find(h.identifier);
        if (it == want_score.end()) continue;
        double rel = std::abs(h.score - it->second) / std::max(std::abs(it->second), 1e-300);
        if (it->second == 0 && h.score == 0) rel = 0;
        worst = std::max(worst, rel);
        ++score_checks;
      }
    }
  }
  v.expect(set_matches == 500, "all hit sets identical");
  v.expect(worst <= 1e-9, "scores within 1e-9 relative");
  v.detail = std::to_string(set_matches) + "/500 hit sets identical (" + std::to_string(spatial) + " spatial, " +
             std::to_string(temporal) + " temporal), " + std::to_string(score_checks) +
             " scores, max relative error " + [&] {
               char buf[32];
               std::snprintf(buf, sizeof buf, "%.2e", worst);
               return std::string(buf);
             }() + " (limit 1e-9)";
  return v;
}

// 5. Fielded search ----------------------------------------------------------

Verdict eagles() {
  Verdict v;
  ServiceConfig config;
  RecordStore store;
  Index index;
  Catalog catalog(store, &index);
  for (const auto& r : testing::eagles_corpus()) catalog.apply(r);
  service::SearchService api(config, catalog);
  auto ids = [&](const std::string& q) {
    auto body = nlohmann::json::parse(api.handle("GET", "/api/search", {{"q", q}}).body);
    std::set<std::string> out;
    for (const auto& h : body["hits"]) out.insert(h["id"].get<std::string>());
    return out;
  };
  auto full_text = ids("eagles");
  auto fielded = ids("title:eagles");
  v.expect(full_text == std::set<std::string>{"music:eagles-1", "usgs:raptors-2"}, "eagles matches both records");
  v.expect(fielded == std::set<std::string>{"music:eagles-1"}, "title:eagles matches only the album");
  v.detail = "eagles -> " + std::to_string(full_text.size()) + " hits, title:eagles -> " +
             std::to_string(fielded.size()) + " hit" + (fielded.size() == 1 ? " (" + *fielded.begin() + ")" : "");
  return v;
}

// 6. Federation formulas -----------------------------------------------------

Verdict federation_formulas() {
  Verdict v;
  std::vector<federation::SourceStats> three(3, {0.99, 0.0});
  double composite = federation::composite_uptime(three);
  // 0.970299 has no exact binary representation; allow the rounding of three multiplications.
  v.expect(std::abs(composite - 0.970299) <= 4 * std::numeric_limits<double>::epsilon(), "closed form");
  double simulated = federation::simulate_availability(three, 1'000'000, 20240601);
  v.expect(std::abs(simulated - 0.970299) <= 0.002, "Monte Carlo within 0.002");

  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> up(0.0, 1.0), lat(0.0, 5000.0), proc(0.0, 250.0);
  int latency_ok = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<federation::SourceStats> sources(1 + rng() % 20);
    for (auto& s : sources) s = {up(rng), lat(rng)};
    double p = proc(rng);
    double slowest = 0;
    for (const auto& s : sources) slowest = std::max(slowest, s.latency_ms);
    latency_ok += federation::federated_latency(sources, p) == slowest + p;
  }
  v.expect(latency_ok == 100, "federated latency equals max plus processing");
  char buf[160];
  std::snprintf(buf, sizeof buf, "composite %.17g, Monte Carlo %.6f (|err| %.6f, limit 0.002), latency %d/100", composite,
                simulated, std::abs(simulated - 0.970299), latency_ok);
  v.detail = buf;
  return v;
}

// 7. Crosswalk fixtures and fuzzing ------------------------------------------

Verdict crosswalk_fixtures() {
  Verdict v;
  auto cases = testing::golden_cases(MERCURY_FIXTURES_DIR);
  std::map<std::string, int> per_standard;
  int exact = 0;
  for (const auto& c : cases) {
    auto got = testing::comparable_json(testing::parse_golden(c));
    auto want = nlohmann::json::parse(testing::read_file(c.expected_path));
    if (got == want) {
      ++exact;
      ++per_standard[c.schema_dir];
    } else {
      v.expect(false, c.schema_dir + "/" + c.name + " differs from its expected record");
    }
  }
  for (const char* standard : {"fgdc", "eml", "dif", "dublincore", "iso19115"}) {
    v.expect(per_standard[standard] >= 2, std::string("two fixtures for ") + standard);
  }

  std::mt19937_64 rng(707);
  int typed = 0, parsed = 0, untyped = 0;
  const std::string xmlish = "<>/=\"' ?!-abcdefgmnopqrstxyz:0123456789\n";
  for (int i = 0; i < 10'000; ++i) {
    std::string doc;
    switch (i % 3) {
      case 0: {
        std::size_t n = rng() % 512;
        for (std::size_t k = 0; k < n; ++k) doc += static_cast<char>(rng());
        break;
      }
      case 1: {
        std::size_t n = rng() % 512;
        for (std::size_t k = 0; k < n; ++k) doc += xmlish[rng() % xmlish.size()];
        break;
      }
      default: {
        doc = testing::read_file(cases[rng() % cases.size()].xml_path);
        int edits = 1 + static_cast<int>(rng() % 8);
        for (int e = 0; e < edits && !doc.empty(); ++e) {
          auto pos = rng() % doc.size();
          switch (rng() % 3) {
            case 0: doc[pos] = static_cast<char>(rng()); break;
            case 1: doc.erase(pos, 1 + rng() % 16); break;
            default: doc.insert(pos, 1, xmlish[rng() % xmlish.size()]);
          }
        }
      }
    }
    try {
      crosswalk::parse_any(doc, "fuzz");
      ++parsed;
    } catch (const crosswalk::CrosswalkError&) {
      ++typed;
    } catch (...) {
      ++untyped;
    }
  }
  v.expect(untyped == 0, "only typed errors while fuzzing");
  std::string counts;
  for (const auto& [k, n] : per_standard) counts += (counts.empty() ? "" : " ") + k + "=" + std::to_string(n);
  v.detail = std::to_string(exact) + "/" + std::to_string(cases.size()) + " fixtures exact (" + counts + "); fuzz 10000: " +
             std::to_string(typed) + " typed errors, " + std::to_string(parsed) + " parsed, " + std::to_string(untyped) +
             " other";
  return v;
}

// 8. Desk-scale performance --------------------------------------------------

Verdict performance() {
  Verdict v;
  std::mt19937_64 rng(808);
  std::vector<std::shared_ptr<const MetadataRecord>> records;
  records.reserve(100'000);
  for (int i = 0; i < 100'000; ++i) records.push_back(std::make_shared<MetadataRecord>(testing::random_record(rng, i)));

  Index index;
  auto start = Clock::now();
  for (std::size_t i = 0; i < records.size(); i += 5000) {
    index.upsert_batch({records.begin() + static_cast<long>(i),
                        records.begin() + static_cast<long>(std::min(records.size(), i + 5000))});
  }
  double index_s = seconds_since(start);
  v.expect(index.size() == 100'000, "all records indexed");
  v.expect(index_s < 60.0, "indexing under 60 s");

  std::vector<double> latencies;
  auto snap = index.snapshot();
  for (int q = 0; q < 400; ++q) {
    Query query{parse_query(testing::kWords[rng() % testing::kWords.size()]), {}, {}};
    auto t = Clock::now();
    auto result = snap->search(query, {});
    latencies.push_back(seconds_since(t) * 1000.0);
    v.expect(result.total_hits > 0, "single-term query matched");
  }
  std::sort(latencies.begin(), latencies.end());
  double p95 = latencies[latencies.size() * 95 / 100];
  v.expect(p95 < 50.0, "p95 under 50 ms");

  TempDir dir;
  start = Clock::now();
  snapshot_save(index, dir / "index.snapshot");
  Index loaded;
  snapshot_load(loaded, dir / "index.snapshot");
  double persist_s = seconds_since(start);
  v.expect(persist_s < 30.0, "save and load under 30 s");

  std::vector<MetadataRecord> sample;
  for (int i = 0; i < 500; ++i) sample.push_back(*records[rng() % records.size()]);
  testing::QueryGenerator gen(rng, sample);
  int equal = 0;
  SearchOptions opt;
  opt.page_size = 20;
  opt.facets = {FacetField::Source, FacetField::Keywords};
  for (int q = 0; q < 100; ++q) {
    auto query = gen.query();
    auto a = index.search(query, opt);
    auto b = loaded.search(query, opt);
    bool same = a.total_hits == b.total_hits && a.hits.size() == b.hits.size() && a.facets == b.facets;
    for (std::size_t h = 0; same && h < a.hits.size(); ++h) {
      same = a.hits[h].identifier == b.hits[h].identifier && a.hits[h].score == b.hits[h].score;
    }
    equal += same;
  }
  v.expect(equal == 100, "probe results equal after reload");
  v.detail = "index 100000 in " + fixed(index_s, 2) + " s (limit 60), p95 " + fixed(p95, 2) + " ms over 400 queries (limit 50), save+load " +
             fixed(persist_s, 2) + " s (limit 30), probes equal " + std::to_string(equal) + "/100";
  return v;
}

// 9. Crash safety ------------------------------------------------------------

Instant provider_latest(const testing::FakeProvider& p) {
  Instant t{};
  for (const auto& [id, e] : p.store.view()->entries()) t = std::max(t, e.record->datestamp);
  return t;
}

void mutate_provider(testing::FakeProvider& p, std::mt19937_64& rng, int& next_index, int count) {
  for (int m = 0; m < count; ++m) {
    auto view = p.store.view();
    auto it = view->entries().begin();
    std::advance(it, static_cast<long>(rng() % view->entries().size()));
    auto stamp = provider_latest(p) + std::chrono::minutes(1 + rng() % 90);
    switch (rng() % 3) {
      case 0: {
        auto r = *it->second.record;
        if (r.deleted) break;
        r.title += " v" + std::to_string(m);
        r.datestamp = stamp;
        r.raw_document = crosswalk::to_oai_dc(r);
        p.store.put(r);
        break;
      }
      case 1: {
        auto r = testing::random_oai_dc_record(rng, next_index++, "prov");
        r.datestamp = stamp;
        r.raw_document = crosswalk::to_oai_dc(r);
        p.store.put(r);
        break;
      }
      default:
        if (!it->second.record->deleted) p.store.put(make_tombstone(*it->second.record, stamp));
    }
  }
}

Verdict crash_safety() {
  struct Crash {};
  Verdict v;
  std::mt19937_64 rng(909);
  int converged = 0;
  for (int trial = 0; trial < 20; ++trial) {
    TempDir dir;
    testing::FakeProvider provider;
    provider.config.page_size = 9;
    int next_index = 0;
    for (int i = 0; i < 60; ++i) provider.store.put(testing::random_oai_dc_record(rng, next_index++, "prov"));
    harvest::StateStore states(dir / "state");
    auto source = live_source(testing::FakeProvider::kBaseUrl);
    auto mode = trial % 2 == 0 ? harvest::HarvestMode::Full : harvest::HarvestMode::Incremental;
    testing::RecordedSleeps sleeps;
    if (mode == harvest::HarvestMode::Incremental) {
      RecordStore store(dir / "store");
      Catalog catalog(store);
      harvest::HarvestEnvironment env{catalog, provider, sleeps.policy(), now_utc, {}};
      states.save(harvest::run_harvest(source, states.load("prov"), harvest::HarvestMode::Full, env).state);
      mutate_provider(provider, rng, next_index, 15);
    }
    std::size_t crash_at = rng() % 40;
    {
      RecordStore store(dir / "store");
      Catalog catalog(store);
      harvest::HarvestEnvironment env{catalog, provider, sleeps.policy(), now_utc, [&](std::size_t k) {
                                        if (k == crash_at) throw Crash{};
                                      }};
      try {
        states.save(harvest::run_harvest(source, states.load("prov"), mode, env).state);
      } catch (const Crash&) {
      }
    }
    RecordStore store(dir / "store");
    Index index;
    Catalog catalog(store, &index);
    catalog.rebuild_index();
    harvest::HarvestEnvironment env{catalog, provider, sleeps.policy(), now_utc, {}};
    auto rerun = harvest::run_harvest(source, states.load("prov"), mode, env);
    auto ids = index.snapshot()->matching_identifiers(Query{});
    bool ok = rerun.report.outcome == harvest::Outcome::Success &&
              live_prints(*store.view()) == live_prints(*provider.store.view()) &&
              std::set<std::string>(ids.begin(), ids.end()).size() == ids.size() &&
              ids.size() == store.view()->live_count();
    converged += ok;
    v.expect(ok, "trial " + std::to_string(trial) + " crashed at record " + std::to_string(crash_at) + " did not converge");
  }
  v.detail = std::to_string(converged) + "/20 interrupted harvests converged with no duplicate identifiers";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"OAI-PMH conformance", oai_conformance},
      {"self-harvest round trip", self_harvest},
      {"incremental harvest efficiency", incremental_efficiency},
      {"search oracle equivalence", search_oracle},
      {"fielded search (eagles)", eagles},
      {"federation formulas", federation_formulas},
      {"crosswalk golden fixtures and fuzzing", crosswalk_fixtures},
      {"desk-scale performance", performance},
      {"crash safety", crash_safety},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("threw: ") + e.what();
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << ": " << v.detail
              << std::endl;
    for (const auto& f : v.failures) std::cout << "     - " << f << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
