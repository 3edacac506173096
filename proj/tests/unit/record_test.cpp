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

#include <doctest.h>

#include <functional>
#include <random>

#include "generators.hpp"
#include "mercury/record.hpp"

using namespace mercury;

namespace {

MetadataRecord sample() {
  MetadataRecord r;
  r.identifier = "ornl:soil-1";
  r.source_id = "ornl";
  r.schema = SchemaKind::FGDC;
  r.title = "Soil Moisture 2003";
  r.abstract = "Daily soil moisture.";
  r.keywords = {"soil", "moisture"};
  r.authors = {"Doe, Jane"};
  r.data_urls = {"https://example.org/soil"};
  r.bbox = GeoBoundingBox::from_wsen(-100, 30, -90, 40);
  r.temporal = TemporalExtent::make(parse_date("2003-01-01"), parse_date("2003-12-31"));
  r.datestamp = *parse_date("2004-02-01");
  r.sets = {"ornl"};
  return r;
}

}  // namespace

TEST_CASE("canonicalize") {
  MetadataRecord r = sample();
  r.title = "  Net  Primary\tProductivity ";
  r.keywords = {"NPP", "npp", "carbon", "  ", " Carbon "};
  r.authors = {"  Doe, Jane ", ""};
  auto c = canonicalize(r);
  CHECK(c.title == "Net Primary Productivity");
  CHECK(c.keywords == std::vector<std::string>{"NPP", "carbon"});
  CHECK(c.authors == std::vector<std::string>{"Doe, Jane"});
  CHECK(canonicalize(c) == c);
  CHECK(canonicalize(sample()) == sample());
}

TEST_CASE("canonicalize is idempotent on random records") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto r = testing::random_record(rng, i);
    r.title = "  " + r.title + " \t ";
    r.keywords.push_back(r.keywords.empty() ? "x" : " " + r.keywords.front() + " ");
    auto once = canonicalize(r);
    CHECK(canonicalize(once) == once);
  }
}

TEST_CASE("fingerprint ignores datestamp and raw document only") {
  auto r = sample();
  auto base = fingerprint(r);
  CHECK(fingerprint(r) == base);

  auto changed = r;
  changed.datestamp += std::chrono::hours(5);
  changed.raw_document = "<x/>";
  CHECK(fingerprint(changed) == base);

  std::vector<std::function<void(MetadataRecord&)>> mutations = {
      [](MetadataRecord& m) { m.identifier += "x"; },
      [](MetadataRecord& m) { m.source_id = "lter"; },
      [](MetadataRecord& m) { m.schema = SchemaKind::EML; },
      [](MetadataRecord& m) { m.title = "Soil Moisture 2004"; },
      [](MetadataRecord& m) { m.abstract.clear(); },
      [](MetadataRecord& m) { m.keywords.push_back("extra"); },
      [](MetadataRecord& m) { std::swap(m.keywords[0], m.keywords[1]); },
      [](MetadataRecord& m) { m.authors.clear(); },
      [](MetadataRecord& m) { m.data_urls[0] += "/v2"; },
      [](MetadataRecord& m) { m.bbox->north = 40.5; },
      [](MetadataRecord& m) { m.bbox.reset(); },
      [](MetadataRecord& m) { m.temporal->end.reset(); },
      [](MetadataRecord& m) { m.temporal.reset(); },
      [](MetadataRecord& m) { m.deleted = true; },
      [](MetadataRecord& m) { m.sets.push_back("extra"); },
      // Moving a value between adjacent lists must not collide.
      [](MetadataRecord& m) {
        m.authors.push_back(m.keywords.back());
        m.keywords.pop_back();
      },
  };
  for (std::size_t i = 0; i < mutations.size(); ++i) {
    auto m = r;
    mutations[i](m);
    INFO("mutation " << i);
    CHECK(fingerprint(m) != base);
  }
}

TEST_CASE("fingerprint hex round-trips") {
  auto f = fingerprint(sample());
  auto hex = f.hex();
  CHECK(hex.size() == 64);
  CHECK(Fingerprint::from_hex(hex) == f);
  CHECK_FALSE(Fingerprint::from_hex("zz"));
}

TEST_CASE("canonical serialization begins with magic and length-prefixed identifier") {
  auto bytes = canonical_serialization(sample());
  REQUIRE(bytes.size() > 9);
  CHECK(bytes.substr(0, 5) == "MRFP1");
  std::string id = "ornl:soil-1";
  CHECK(bytes.substr(5, 4) == std::string("\0\0\0\x0b", 4));
  CHECK(bytes.substr(9, id.size()) == id);
}

TEST_CASE("json serialization round-trips") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    auto r = testing::random_record(rng, i);
    if (i % 3 == 0) r.raw_document = std::string("<x>\0\xFF</x>", 9);
    auto line = to_json_line(r);
    auto back = record_from_json(nlohmann::json::parse(line));
    CHECK(back == r);
    CHECK(to_json_line(back) == line);
  }
}

TEST_CASE("json field order is fixed") {
  auto j = to_json(sample());
  std::vector<std::string> keys;
  for (auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"identifier", "source_id", "schema", "title", "abstract",
                                         "keywords", "authors", "data_urls", "bbox", "temporal",
                                         "datestamp", "deleted", "sets", "raw_document"});
  CHECK(j["bbox"].dump() == R"({"west":-100.0,"south":30.0,"east":-90.0,"north":40.0})");
  CHECK(j["temporal"]["start"] == "2003-01-01T00:00:00Z");
}

TEST_CASE("validation") {
  CHECK(validate(sample()).empty());
  auto r = sample();
  r.title.clear();
  CHECK_FALSE(validate(r).empty());
  r.deleted = true;
  CHECK(validate(r).empty());
  r = sample();
  r.identifier.clear();
  CHECK_FALSE(validate(r).empty());

  CHECK_THROWS_AS(GeoBoundingBox::from_wsen(200, 0, 10, 10), RecordError);
  CHECK_THROWS_AS(GeoBoundingBox::from_wsen(0, 10, 10, 0), RecordError);
  CHECK(GeoBoundingBox::from_wsen(170, -5, -170, 5).crosses_antimeridian());
  CHECK_THROWS_AS(TemporalExtent::make(std::nullopt, std::nullopt), RecordError);
  CHECK_THROWS_AS(TemporalExtent::make(parse_date("2005"), parse_date("2004")), RecordError);
  CHECK_THROWS_AS(record_from_json(nlohmann::json::parse(R"({"identifier":""})")), RecordError);
}

TEST_CASE("identifiers are source-qualified once") {
  CHECK(qualify_identifier("ornl", "abc") == "ornl:abc");
  CHECK(qualify_identifier("ornl", "ornl:abc") == "ornl:abc");
  CHECK(qualify_identifier("ornl", "oai:x:1") == "ornl:oai:x:1");
}

TEST_CASE("tombstones keep identity and drop content") {
  auto t = make_tombstone(sample(), *parse_date("2010-01-01"));
  CHECK(t.deleted);
  CHECK(t.identifier == "ornl:soil-1");
  CHECK(t.source_id == "ornl");
  CHECK(t.title.empty());
  CHECK(validate(t).empty());
}
