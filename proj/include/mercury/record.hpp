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

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mercury/time.hpp"

namespace mercury {

enum class SchemaKind { FGDC, EML, DIF, DublinCore, ISO19115, OaiDc };

inline constexpr std::array<SchemaKind, 6> kAllSchemas = {
    SchemaKind::FGDC,       SchemaKind::EML,      SchemaKind::DIF,
    SchemaKind::DublinCore, SchemaKind::ISO19115, SchemaKind::OaiDc};

std::string_view to_string(SchemaKind kind) noexcept;
std::optional<SchemaKind> schema_from_string(std::string_view name) noexcept;

class RecordError : public std::runtime_error {
 public:
  enum class Code { CoordinateOutOfRange, InvalidTemporalExtent, InvalidRecord };

  RecordError(Code code, const std::string& message) : std::runtime_error(message), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

/// Rectangle in degrees. west > east denotes a box crossing the
/// antimeridian, covering [west, 180] and [-180, east].
struct GeoBoundingBox {
  double west = 0;
  double east = 0;
  double south = 0;
  double north = 0;

  /// Validating constructor, argument order W,S,E,N as in "box: W,S,E,N".
  static GeoBoundingBox from_wsen(double west, double south, double east, double north);

  bool crosses_antimeridian() const noexcept { return west > east; }

  friend bool operator==(const GeoBoundingBox&, const GeoBoundingBox&) = default;
};

/// Returns an empty string when the box is valid, otherwise the reason.
std::string validate(const GeoBoundingBox& box);

struct TemporalExtent {
  std::optional<Instant> start;
  std::optional<Instant> end;

  static TemporalExtent make(std::optional<Instant> start, std::optional<Instant> end);

  friend bool operator==(const TemporalExtent&, const TemporalExtent&) = default;
};

std::string validate(const TemporalExtent& extent);

struct MetadataRecord {
  std::string identifier;
  std::string source_id;
  SchemaKind schema = SchemaKind::DublinCore;
  std::string title;
  std::string abstract;
  std::vector<std::string> keywords;
  std::vector<std::string> authors;
  std::vector<std::string> data_urls;
  std::optional<GeoBoundingBox> bbox;
  std::optional<TemporalExtent> temporal;
  Instant datestamp{};
  bool deleted = false;
  std::vector<std::string> sets;
  std::string raw_document;

  friend bool operator==(const MetadataRecord&, const MetadataRecord&) = default;
};

/// Checks the record invariants; returns an empty string when they hold.
std::string validate(const MetadataRecord& record);

/// "{source_id}:{local_id}". Already-qualified ids are returned unchanged so
/// that re-harvesting an aggregator does not stack prefixes.
std::string qualify_identifier(std::string_view source_id, std::string_view local_id);

MetadataRecord canonicalize(MetadataRecord record);

struct Fingerprint {
  std::array<std::uint8_t, 32> digest{};

  std::string hex() const;
  static std::optional<Fingerprint> from_hex(std::string_view hex);

  friend auto operator<=>(const Fingerprint&, const Fingerprint&) = default;
};

/// Length-prefixed binary layout hashed by fingerprint(); see
/// docs/formats.md. Excludes raw_document and datestamp.
std::string canonical_serialization(const MetadataRecord& record);

Fingerprint fingerprint(const MetadataRecord& record);

/// Record store JSON object, keys in documented order.
nlohmann::ordered_json to_json(const MetadataRecord& record);
/// Throws RecordError(InvalidRecord) on missing keys or wrong types.
MetadataRecord record_from_json(const nlohmann::json& j);

std::string to_json_line(const MetadataRecord& record);

/// A deleted-state record carrying only identity and provenance.
MetadataRecord make_tombstone(const MetadataRecord& previous, Instant datestamp);

}  // namespace mercury
