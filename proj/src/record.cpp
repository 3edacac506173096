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

#include "mercury/record.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <unordered_set>

#include <openssl/sha.h>

#include "mercury/text.hpp"

namespace mercury {

namespace {

constexpr std::array<std::string_view, 6> kSchemaNames = {"FGDC",       "EML",      "DIF",
                                                          "DublinCore", "ISO19115", "OaiDc"};

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out += static_cast<char>((v >> shift) & 0xFF);
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out += static_cast<char>((v >> shift) & 0xFF);
}

void put_string(std::string& out, std::string_view s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

void put_list(std::string& out, const std::vector<std::string>& values) {
  put_u32(out, static_cast<std::uint32_t>(values.size()));
  for (const auto& v : values) put_string(out, v);
}

void put_double(std::string& out, double v) {
  if (v == 0.0) v = 0.0;
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::vector<std::string> trimmed_non_empty(const std::vector<std::string>& values) {
  std::vector<std::string> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    auto t = text::trim(v);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

[[noreturn]] void invalid(const std::string& what) {
  throw RecordError(RecordError::Code::InvalidRecord, "invalid record JSON: " + what);
}

std::string get_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) invalid(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<std::string> get_string_list(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) invalid(std::string("'") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) invalid(std::string("'") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

double get_number(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) invalid(std::string("'") + key + "' must be a number");
  return it->get<double>();
}

std::optional<Instant> get_optional_instant(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) invalid(std::string("'") + key + "' must be a datestamp string");
  auto parsed = parse_oai_datestamp(it->get<std::string>());
  if (!parsed) invalid(std::string("'") + key + "' is not YYYY-MM-DDThh:mm:ssZ");
  return parsed->instant;
}

}  // namespace

std::string_view to_string(SchemaKind kind) noexcept {
  return kSchemaNames[static_cast<std::size_t>(kind)];
}

std::optional<SchemaKind> schema_from_string(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kSchemaNames.size(); ++i) {
    if (kSchemaNames[i] == name) return static_cast<SchemaKind>(i);
  }
  return std::nullopt;
}

GeoBoundingBox GeoBoundingBox::from_wsen(double west, double south, double east, double north) {
  GeoBoundingBox box{west, east, south, north};
  if (auto why = validate(box); !why.empty()) {
    throw RecordError(RecordError::Code::CoordinateOutOfRange, why);
  }
  return box;
}

std::string validate(const GeoBoundingBox& b) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(b.west) || !finite(b.east) || !finite(b.south) || !finite(b.north)) {
    return "bounding box coordinates must be finite";
  }
  if (b.west < -180 || b.west > 180 || b.east < -180 || b.east > 180) {
    return "longitude out of range [-180, 180]";
  }
  if (b.south < -90 || b.south > 90 || b.north < -90 || b.north > 90) {
    return "latitude out of range [-90, 90]";
  }
  if (b.south > b.north) return "south must not exceed north";
  return {};
}

TemporalExtent TemporalExtent::make(std::optional<Instant> start, std::optional<Instant> end) {
  TemporalExtent extent{start, end};
  if (auto why = validate(extent); !why.empty()) {
    throw RecordError(RecordError::Code::InvalidTemporalExtent, why);
  }
  return extent;
}

std::string validate(const TemporalExtent& e) {
  if (!e.start && !e.end) return "temporal extent needs a start or an end";
  if (e.start && e.end && *e.start > *e.end) return "temporal start is after end";
  return {};
}

std::string validate(const MetadataRecord& r) {
  if (r.identifier.empty()) return "identifier is empty";
  if (!r.deleted && r.title.empty()) return "record '" + r.identifier + "' has no title";
  if (r.bbox) {
    if (auto why = validate(*r.bbox); !why.empty()) return why;
  }
  if (r.temporal) {
    if (auto why = validate(*r.temporal); !why.empty()) return why;
  }
  return {};
}

std::string qualify_identifier(std::string_view source_id, std::string_view local_id) {
  std::string prefix = std::string(source_id) + ":";
  if (local_id.starts_with(prefix)) return std::string(local_id);
  return prefix + std::string(local_id);
}

MetadataRecord canonicalize(MetadataRecord r) {
  r.title = text::collapse_whitespace(r.title);
  r.abstract = text::collapse_whitespace(r.abstract);

  std::vector<std::string> keywords;
  std::unordered_set<std::string> seen;
  for (const auto& k : r.keywords) {
    auto t = text::trim(k);
    if (t.empty()) continue;
    if (seen.insert(text::to_lower_utf8(t)).second) keywords.emplace_back(t);
  }
  r.keywords = std::move(keywords);
  r.authors = trimmed_non_empty(r.authors);
  r.data_urls = trimmed_non_empty(r.data_urls);
  r.sets = trimmed_non_empty(r.sets);
  if (r.bbox) {
    for (double* v : {&r.bbox->west, &r.bbox->east, &r.bbox->south, &r.bbox->north}) {
      if (*v == 0.0) *v = 0.0;
    }
  }
  return r;
}

std::string Fingerprint::hex() const { return text::hex_encode(digest.data(), digest.size()); }

std::optional<Fingerprint> Fingerprint::from_hex(std::string_view hex) {
  if (hex.size() != 64) return std::nullopt;
  Fingerprint fp;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (std::size_t i = 0; i < 32; ++i) {
    int hi = nibble(hex[2 * i]), lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    fp.digest[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return fp;
}

std::string canonical_serialization(const MetadataRecord& r) {
  std::string out = "MRFP1";
  put_string(out, r.identifier);
  put_string(out, r.source_id);
  put_string(out, to_string(r.schema));
  put_string(out, r.title);
  put_string(out, r.abstract);
  put_list(out, r.keywords);
  put_list(out, r.authors);
  put_list(out, r.data_urls);
  if (r.bbox) {
    out += '\x01';
    put_double(out, r.bbox->west);
    put_double(out, r.bbox->south);
    put_double(out, r.bbox->east);
    put_double(out, r.bbox->north);
  } else {
    out += '\x00';
  }
  if (r.temporal) {
    std::uint8_t flags = (r.temporal->start ? 1 : 0) | (r.temporal->end ? 2 : 0);
    out += '\x01';
    out += static_cast<char>(flags);
    if (r.temporal->start) {
      put_u64(out, static_cast<std::uint64_t>(r.temporal->start->time_since_epoch().count()));
    }
    if (r.temporal->end) {
      put_u64(out, static_cast<std::uint64_t>(r.temporal->end->time_since_epoch().count()));
    }
  } else {
    out += '\x00';
  }
  out += r.deleted ? '\x01' : '\x00';
  put_list(out, r.sets);
  return out;
}

Fingerprint fingerprint(const MetadataRecord& record) {
  auto bytes = canonical_serialization(record);
  Fingerprint fp;
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), fp.digest.data());
  return fp;
}

nlohmann::ordered_json to_json(const MetadataRecord& r) {
  nlohmann::ordered_json j;
  j["identifier"] = r.identifier;
  j["source_id"] = r.source_id;
  j["schema"] = to_string(r.schema);
  j["title"] = r.title;
  j["abstract"] = r.abstract;
  j["keywords"] = r.keywords;
  j["authors"] = r.authors;
  j["data_urls"] = r.data_urls;
  if (r.bbox) {
    j["bbox"] = {{"west", r.bbox->west},
                 {"south", r.bbox->south},
                 {"east", r.bbox->east},
                 {"north", r.bbox->north}};
  } else {
    j["bbox"] = nullptr;
  }
  if (r.temporal) {
    nlohmann::ordered_json t;
    t["start"] = r.temporal->start ? nlohmann::ordered_json(format_utc(*r.temporal->start))
                                   : nlohmann::ordered_json(nullptr);
    t["end"] = r.temporal->end ? nlohmann::ordered_json(format_utc(*r.temporal->end))
                               : nlohmann::ordered_json(nullptr);
    j["temporal"] = std::move(t);
  } else {
    j["temporal"] = nullptr;
  }
  j["datestamp"] = format_utc(r.datestamp);
  j["deleted"] = r.deleted;
  j["sets"] = r.sets;
  j["raw_document"] = text::base64_encode(r.raw_document);
  return j;
}

MetadataRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) invalid("not an object");
  MetadataRecord r;
  r.identifier = get_string(j, "identifier");
  r.source_id = get_string(j, "source_id");
  auto schema = schema_from_string(get_string(j, "schema"));
  if (!schema) invalid("unknown schema");
  r.schema = *schema;
  r.title = get_string(j, "title");
  r.abstract = get_string(j, "abstract");
  r.keywords = get_string_list(j, "keywords");
  r.authors = get_string_list(j, "authors");
  r.data_urls = get_string_list(j, "data_urls");
  if (auto it = j.find("bbox"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) invalid("'bbox' must be an object or null");
    r.bbox = GeoBoundingBox{get_number(*it, "west"), get_number(*it, "east"),
                            get_number(*it, "south"), get_number(*it, "north")};
  }
  if (auto it = j.find("temporal"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) invalid("'temporal' must be an object or null");
    r.temporal = TemporalExtent{get_optional_instant(*it, "start"), get_optional_instant(*it, "end")};
  }
  auto datestamp = get_optional_instant(j, "datestamp");
  if (!datestamp) invalid("'datestamp' is required");
  r.datestamp = *datestamp;
  auto deleted = j.find("deleted");
  if (deleted == j.end() || !deleted->is_boolean()) invalid("'deleted' must be a boolean");
  r.deleted = deleted->get<bool>();
  r.sets = get_string_list(j, "sets");
  try {
    r.raw_document = text::base64_decode(get_string(j, "raw_document"));
  } catch (const std::invalid_argument& e) {
    invalid(std::string("'raw_document': ") + e.what());
  }
  if (auto why = validate(r); !why.empty()) invalid(why);
  return r;
}

std::string to_json_line(const MetadataRecord& record) {
  return to_json(record).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

MetadataRecord make_tombstone(const MetadataRecord& previous, Instant datestamp) {
  MetadataRecord t;
  t.identifier = previous.identifier;
  t.source_id = previous.source_id;
  t.schema = previous.schema;
  t.sets = previous.sets;
  t.datestamp = datestamp;
  t.deleted = true;
  return t;
}

}  // namespace mercury
