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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mercury/record.hpp"
#include "mercury/xml.hpp"

namespace mercury::crosswalk {

inline constexpr std::string_view kOaiDcNamespace = "http://www.openarchives.org/OAI/2.0/oai_dc/";
inline constexpr std::string_view kDcNamespace = "http://purl.org/dc/elements/1.1/";
inline constexpr std::string_view kDcTermsNamespace = "http://purl.org/dc/terms/";
inline constexpr std::string_view kGmdNamespace = "http://www.isotc211.org/2005/gmd";
inline constexpr std::string_view kDifNamespace = "http://gcmd.gsfc.nasa.gov/Aboutus/xml/dif/";

class CrosswalkError : public std::runtime_error {
 public:
  enum class Code {
    MalformedXml,
    UnknownSchema,
    MissingRequiredField,
    CoordinateOutOfRange,
    InvalidDate,
    DeletedRecord,
  };

  CrosswalkError(Code code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

std::string_view to_string(CrosswalkError::Code code) noexcept;

/// Harvest-side facts that the document itself does not carry.
struct ParseContext {
  /// Provider-local identifier (OAI header identifier, relative path).
  /// Takes precedence over any identifier found in the document.
  std::optional<std::string> local_id;
  /// Used only when neither local_id nor the document supplies one.
  std::optional<std::string> fallback_id;
  /// Provider datestamp; when absent the document's own metadata date is
  /// used, falling back to 1970-01-01T00:00:00Z.
  std::optional<Instant> datestamp;
  std::vector<std::string> sets;
};

/// Root-signature detection; see docs/crosswalk.md for the table.
SchemaKind detect_schema(const xml::Element& root);
/// Throws CrosswalkError(MalformedXml | UnknownSchema).
SchemaKind detect_schema(std::string_view document);

/// Maps a document into a canonicalized record. DublinCore and OaiDc are
/// interchangeable here since both use the Dublin Core element mapping.
MetadataRecord parse(SchemaKind schema, std::string_view document, std::string_view source_id,
                     const ParseContext& context = {});
MetadataRecord parse(SchemaKind schema, const xml::Element& root, std::string_view document,
                     std::string_view source_id, const ParseContext& context = {});

/// detect_schema followed by parse.
MetadataRecord parse_any(std::string_view document, std::string_view source_id,
                         const ParseContext& context = {});

/// "box: W,S,E,N" and "time: START/END" coverage encodings.
std::string encode_box_coverage(const GeoBoundingBox& box);
std::string encode_time_coverage(const TemporalExtent& extent);
/// nullopt when the text is not in the box encoding; throws
/// CrosswalkError(CoordinateOutOfRange) when it is but the box is invalid.
std::optional<GeoBoundingBox> decode_box_coverage(std::string_view text);
std::optional<TemporalExtent> decode_time_coverage(std::string_view text);

/// Renders the record as an oai_dc:dc element (no XML declaration).
/// Throws CrosswalkError(DeletedRecord).
std::string to_oai_dc(const MetadataRecord& record);

/// The record's raw document re-serialized as UTF-8 markup without a
/// declaration, for embedding in OAI-PMH responses. nullopt when there is no
/// parseable raw document.
std::optional<std::string> native_markup(const MetadataRecord& record);

}  // namespace mercury::crosswalk
