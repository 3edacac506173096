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
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mercury/record.hpp"

namespace mercury {

enum class IndexedField { All, Title, Abstract, Keywords, Author, Source, Schema };

inline constexpr std::size_t kFieldCount = 7;
inline constexpr std::array<IndexedField, kFieldCount> kAllFields = {
    IndexedField::All,    IndexedField::Title,  IndexedField::Abstract, IndexedField::Keywords,
    IndexedField::Author, IndexedField::Source, IndexedField::Schema};

std::string_view to_string(IndexedField field) noexcept;
/// Case-insensitive; accepts the lower-case query syntax names.
std::optional<IndexedField> field_from_string(std::string_view name) noexcept;

/// Title, Abstract and All keep token positions; the others are label
/// fields whose phrases must equal a whole value.
constexpr bool is_positional(IndexedField f) noexcept {
  return f == IndexedField::All || f == IndexedField::Title || f == IndexedField::Abstract;
}

/// Lowercases and splits on every non-alphanumeric code point.
std::vector<std::string> tokenize(std::string_view text);

/// The values a record contributes to a field. All is title, abstract,
/// keywords and authors in that order, tokenized as one stream.
std::vector<std::string_view> field_values(const MetadataRecord& record, IndexedField field);

struct QueryNode {
  enum class Kind { Term, Phrase, And, Or, Not, MatchAll };

  Kind kind = Kind::MatchAll;
  IndexedField field = IndexedField::All;
  std::vector<std::string> tokens;  // one for Term, two or more for Phrase
  std::vector<QueryNode> children;

  static QueryNode term(IndexedField field, std::string token);
  static QueryNode phrase(IndexedField field, std::vector<std::string> tokens);
  static QueryNode all_of(std::vector<QueryNode> children);
  static QueryNode any_of(std::vector<QueryNode> children);
  static QueryNode negate(QueryNode child);
  static QueryNode match_all();

  friend bool operator==(const QueryNode&, const QueryNode&) = default;
};

std::string to_string(const QueryNode& node);

enum class SpatialRelation { Intersects, Contains, Within };

std::string_view to_string(SpatialRelation relation) noexcept;
std::optional<SpatialRelation> spatial_relation_from_string(std::string_view name) noexcept;

struct SpatialFilter {
  GeoBoundingBox box;
  SpatialRelation relation = SpatialRelation::Intersects;
};

struct TemporalFilter {
  std::optional<Instant> start;
  std::optional<Instant> end;
};

struct Query {
  QueryNode root = QueryNode::match_all();
  std::optional<SpatialFilter> spatial;
  std::optional<TemporalFilter> temporal;
};

class QueryError : public std::runtime_error {
 public:
  enum class Code { SyntaxError, UnknownField, PureNegativeQuery };

  QueryError(Code code, std::size_t position, const std::string& message)
      : std::runtime_error(message), code_(code), position_(position) {}
  Code code() const noexcept { return code_; }
  /// Byte offset into the query string.
  std::size_t position() const noexcept { return position_; }

 private:
  Code code_;
  std::size_t position_;
};

std::string_view to_string(QueryError::Code code) noexcept;

/// Grammar:
///   query   := and ("OR" and)*
///   and     := unary ("AND"? unary)*
///   unary   := "NOT" unary | primary
///   primary := "(" query ")" | "*" | [field ":"] (word | '"' phrase '"')
/// A blank query is MatchAll. A word or phrase with several tokens becomes
/// a Phrase, with one token a Term. NOT must sit directly under an And that
/// also has a positive operand.
QueryNode parse_query(std::string_view text);

/// Antimeridian-crossing boxes are split in two before comparing.
bool spatial_match(const GeoBoundingBox& record_box, const GeoBoundingBox& query_box,
                   SpatialRelation relation);

/// Closed-interval overlap; absent bounds are unbounded.
bool temporal_match(const TemporalExtent& record, std::optional<Instant> query_start,
                    std::optional<Instant> query_end);

}  // namespace mercury
