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

#include "mercury/query.hpp"

#include <algorithm>

#include "mercury/text.hpp"

namespace mercury {

namespace {

constexpr std::array<std::string_view, kFieldCount> kFieldNames = {
    "all", "title", "abstract", "keywords", "author", "source", "schema"};

struct Lexeme {
  enum class Kind { Word, Quoted, LParen, RParen, Star, Or, And, Not, End };
  Kind kind = Kind::End;
  std::size_t pos = 0;
  std::string text;
  std::optional<IndexedField> field;
};

bool is_break(char c) { return text::is_space(c) || c == '(' || c == ')' || c == '"'; }

bool all_ascii_letters(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  });
}

QueryError syntax(std::size_t pos, const std::string& what) {
  return QueryError(QueryError::Code::SyntaxError, pos,
                    "syntax error at position " + std::to_string(pos) + ": " + what);
}

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  std::vector<Lexeme> run() {
    std::vector<Lexeme> out;
    while (true) {
      while (i_ < s_.size() && text::is_space(s_[i_])) ++i_;
      if (i_ >= s_.size()) break;
      out.push_back(next());
    }
    out.push_back({Lexeme::Kind::End, s_.size(), {}, {}});
    return out;
  }

 private:
  Lexeme next() {
    std::size_t start = i_;
    char c = s_[i_];
    if (c == '(') return ++i_, Lexeme{Lexeme::Kind::LParen, start, {}, {}};
    if (c == ')') return ++i_, Lexeme{Lexeme::Kind::RParen, start, {}, {}};
    if (c == '"') return quoted(start, std::nullopt);

    while (i_ < s_.size() && !is_break(s_[i_])) ++i_;
    std::string_view word = s_.substr(start, i_ - start);
    if (word == "OR") return {Lexeme::Kind::Or, start, {}, {}};
    if (word == "AND") return {Lexeme::Kind::And, start, {}, {}};
    if (word == "NOT") return {Lexeme::Kind::Not, start, {}, {}};
    if (word == "*") return {Lexeme::Kind::Star, start, {}, {}};

    auto colon = word.find(':');
    if (colon != std::string_view::npos && all_ascii_letters(word.substr(0, colon))) {
      auto name = word.substr(0, colon);
      auto field = field_from_string(name);
      if (!field) {
        throw QueryError(QueryError::Code::UnknownField, start,
                         "unknown field '" + std::string(name) + "' at position " +
                             std::to_string(start));
      }
      auto rest = word.substr(colon + 1);
      if (!rest.empty()) return {Lexeme::Kind::Word, start, std::string(rest), field};
      if (i_ < s_.size() && s_[i_] == '"') return quoted(i_, field);
      throw syntax(start, "expected a word or phrase after '" + std::string(word) + "'");
    }
    return {Lexeme::Kind::Word, start, std::string(word), std::nullopt};
  }

  Lexeme quoted(std::size_t quote_pos, std::optional<IndexedField> field) {
    std::size_t close = s_.find('"', quote_pos + 1);
    if (close == std::string_view::npos) throw syntax(quote_pos, "unterminated phrase");
    Lexeme l{Lexeme::Kind::Quoted, quote_pos, std::string(s_.substr(quote_pos + 1, close - quote_pos - 1)),
             field};
    i_ = close + 1;
    return l;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

class Parser {
 public:
  explicit Parser(std::vector<Lexeme> lexemes) : lx_(std::move(lexemes)) {}

  QueryNode parse() {
    if (peek().kind == Lexeme::Kind::End) return QueryNode::match_all();
    auto q = parse_or();
    if (peek().kind != Lexeme::Kind::End) {
      throw syntax(peek().pos, peek().kind == Lexeme::Kind::RParen ? "unbalanced ')'"
                                                                   : "unexpected input");
    }
    return q;
  }

 private:
  const Lexeme& peek() const { return lx_[k_]; }
  const Lexeme& take() { return lx_[k_++]; }

  bool starts_unary() const {
    switch (peek().kind) {
      case Lexeme::Kind::Word:
      case Lexeme::Kind::Quoted:
      case Lexeme::Kind::LParen:
      case Lexeme::Kind::Star:
      case Lexeme::Kind::Not: return true;
      default: return false;
    }
  }

  QueryNode parse_or() {
    std::vector<QueryNode> alternatives;
    while (true) {
      std::size_t pos = peek().pos;
      auto alt = parse_and();
      if (alt.kind == QueryNode::Kind::Not) {
        throw QueryError(QueryError::Code::PureNegativeQuery, pos,
                         "NOT needs a positive term beside it (position " + std::to_string(pos) + ")");
      }
      alternatives.push_back(std::move(alt));
      if (peek().kind != Lexeme::Kind::Or) break;
      take();
    }
    return QueryNode::any_of(std::move(alternatives));
  }

  QueryNode parse_and() {
    std::vector<QueryNode> parts;
    std::size_t first_pos = peek().pos;
    parts.push_back(parse_unary());
    while (true) {
      if (peek().kind == Lexeme::Kind::And) {
        take();
        if (!starts_unary()) throw syntax(peek().pos, "expected an operand after AND");
      } else if (!starts_unary()) {
        break;
      }
      parts.push_back(parse_unary());
    }
    if (parts.size() > 1 && std::all_of(parts.begin(), parts.end(), [](const QueryNode& n) {
          return n.kind == QueryNode::Kind::Not;
        })) {
      throw QueryError(QueryError::Code::PureNegativeQuery, first_pos,
                       "query has only negated terms (position " + std::to_string(first_pos) + ")");
    }
    return QueryNode::all_of(std::move(parts));
  }

  QueryNode parse_unary() {
    if (peek().kind == Lexeme::Kind::Not) {
      std::size_t pos = take().pos;
      if (!starts_unary()) throw syntax(peek().pos, "expected an operand after NOT");
      auto operand = parse_unary();
      if (operand.kind == QueryNode::Kind::Not) {
        throw QueryError(QueryError::Code::PureNegativeQuery, pos,
                         "NOT cannot negate another NOT (position " + std::to_string(pos) + ")");
      }
      return QueryNode::negate(std::move(operand));
    }
    return parse_primary();
  }

  QueryNode parse_primary() {
    const Lexeme& l = take();
    switch (l.kind) {
      case Lexeme::Kind::LParen: {
        if (peek().kind == Lexeme::Kind::RParen) throw syntax(l.pos, "empty group");
        auto inner = parse_or();
        if (peek().kind != Lexeme::Kind::RParen) throw syntax(l.pos, "unbalanced '('");
        take();
        return inner;
      }
      case Lexeme::Kind::Star: return QueryNode::match_all();
      case Lexeme::Kind::Word:
      case Lexeme::Kind::Quoted: {
        auto tokens = tokenize(l.text);
        auto field = l.field.value_or(IndexedField::All);
        if (tokens.empty()) {
          throw syntax(l.pos, l.kind == Lexeme::Kind::Quoted ? "empty phrase"
                                                             : "word has no searchable characters");
        }
        if (tokens.size() == 1) return QueryNode::term(field, std::move(tokens.front()));
        return QueryNode::phrase(field, std::move(tokens));
      }
      case Lexeme::Kind::End: throw syntax(l.pos, "unexpected end of query");
      case Lexeme::Kind::RParen: throw syntax(l.pos, "unbalanced ')'");
      default: throw syntax(l.pos, "operator without operand");
    }
  }

  std::vector<Lexeme> lx_;
  std::size_t k_ = 0;
};


struct Rect {
  double west, east, south, north;
};

std::vector<Rect> decompose(const GeoBoundingBox& b) {
  if (!b.crosses_antimeridian()) return {{b.west, b.east, b.south, b.north}};
  return {{b.west, 180.0, b.south, b.north}, {-180.0, b.east, b.south, b.north}};
}

bool overlaps(const Rect& a, const Rect& b) {
  return a.west <= b.east && b.west <= a.east && a.south <= b.north && b.south <= a.north;
}

bool inside(const Rect& inner, const Rect& outer) {
  return outer.west <= inner.west && inner.east <= outer.east && outer.south <= inner.south &&
         inner.north <= outer.north;
}

bool covers(const GeoBoundingBox& outer, const GeoBoundingBox& inner) {
  auto outer_parts = decompose(outer);
  for (const auto& part : decompose(inner)) {
    bool ok = std::any_of(outer_parts.begin(), outer_parts.end(),
                          [&](const Rect& o) { return inside(part, o); });
    if (!ok) return false;
  }
  return true;
}

void append_node(const QueryNode& n, std::string& out) {
  auto quote = [&](const std::string& t) { out += '"' + t + '"'; };
  switch (n.kind) {
    case QueryNode::Kind::MatchAll: out += "MatchAll"; return;
    case QueryNode::Kind::Term:
      out += "Term(";
      out += to_string(n.field);
      out += ',';
      quote(n.tokens.front());
      out += ')';
      return;
    case QueryNode::Kind::Phrase:
      out += "Phrase(";
      out += to_string(n.field);
      for (const auto& t : n.tokens) {
        out += ',';
        quote(t);
      }
      out += ')';
      return;
    default: break;
  }
  out += n.kind == QueryNode::Kind::And ? "And(" : n.kind == QueryNode::Kind::Or ? "Or(" : "Not(";
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    if (i > 0) out += ", ";
    append_node(n.children[i], out);
  }
  out += ')';
}

QueryNode combine(QueryNode::Kind kind, std::vector<QueryNode> children) {
  if (children.size() == 1) return std::move(children.front());
  QueryNode n;
  n.kind = kind;
  for (auto& c : children) {
    if (c.kind == kind) {
      for (auto& g : c.children) n.children.push_back(std::move(g));
    } else {
      n.children.push_back(std::move(c));
    }
  }
  return n;
}

}  // namespace

std::string_view to_string(IndexedField field) noexcept {
  switch (field) {
    case IndexedField::All: return "All";
    case IndexedField::Title: return "Title";
    case IndexedField::Abstract: return "Abstract";
    case IndexedField::Keywords: return "Keywords";
    case IndexedField::Author: return "Author";
    case IndexedField::Source: return "Source";
    case IndexedField::Schema: return "Schema";
  }
  return "?";
}

std::optional<IndexedField> field_from_string(std::string_view name) noexcept {
  std::string lower;
  for (char c : name) lower += static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c);
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    if (kFieldNames[i] == lower) return kAllFields[i];
  }
  return std::nullopt;
}

std::vector<std::string> tokenize(std::string_view input) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  bool ascii = std::all_of(input.begin(), input.end(),
                           [](char c) { return static_cast<unsigned char>(c) < 0x80; });
  if (ascii) {
    for (char c : input) {
      if (c >= 'A' && c <= 'Z') {
        current += static_cast<char>(c + 32);
      } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
        current += c;
      } else {
        flush();
      }
    }
  } else {
    for (char32_t cp : text::decode_utf8(input)) {
      if (text::is_alnum(cp)) {
        text::append_utf8(current, text::to_lower(cp));
      } else {
        flush();
      }
    }
  }
  flush();
  return out;
}

std::vector<std::string_view> field_values(const MetadataRecord& r, IndexedField field) {
  std::vector<std::string_view> out;
  switch (field) {
    case IndexedField::Title: out.push_back(r.title); break;
    case IndexedField::Abstract: out.push_back(r.abstract); break;
    case IndexedField::Keywords: out.assign(r.keywords.begin(), r.keywords.end()); break;
    case IndexedField::Author: out.assign(r.authors.begin(), r.authors.end()); break;
    case IndexedField::Source: out.push_back(r.source_id); break;
    case IndexedField::Schema: out.push_back(to_string(r.schema)); break;
    case IndexedField::All:
      out.push_back(r.title);
      out.push_back(r.abstract);
      out.insert(out.end(), r.keywords.begin(), r.keywords.end());
      out.insert(out.end(), r.authors.begin(), r.authors.end());
      break;
  }
  return out;
}

QueryNode QueryNode::term(IndexedField field, std::string token) {
  QueryNode n;
  n.kind = Kind::Term;
  n.field = field;
  n.tokens.push_back(std::move(token));
  return n;
}

QueryNode QueryNode::phrase(IndexedField field, std::vector<std::string> tokens) {
  QueryNode n;
  n.kind = Kind::Phrase;
  n.field = field;
  n.tokens = std::move(tokens);
  return n;
}

QueryNode QueryNode::all_of(std::vector<QueryNode> children) {
  return combine(Kind::And, std::move(children));
}

QueryNode QueryNode::any_of(std::vector<QueryNode> children) {
  return combine(Kind::Or, std::move(children));
}

QueryNode QueryNode::negate(QueryNode child) {
  QueryNode n;
  n.kind = Kind::Not;
  n.children.push_back(std::move(child));
  return n;
}

QueryNode QueryNode::match_all() { return QueryNode{}; }

std::string to_string(const QueryNode& node) {
  std::string out;
  append_node(node, out);
  return out;
}

std::string_view to_string(SpatialRelation relation) noexcept {
  switch (relation) {
    case SpatialRelation::Intersects: return "intersects";
    case SpatialRelation::Contains: return "contains";
    case SpatialRelation::Within: return "within";
  }
  return "?";
}

std::optional<SpatialRelation> spatial_relation_from_string(std::string_view name) noexcept {
  for (auto r : {SpatialRelation::Intersects, SpatialRelation::Contains, SpatialRelation::Within}) {
    if (text::iequals(name, to_string(r))) return r;
  }
  return std::nullopt;
}

std::string_view to_string(QueryError::Code code) noexcept {
  switch (code) {
    case QueryError::Code::SyntaxError: return "SyntaxError";
    case QueryError::Code::UnknownField: return "UnknownField";
    case QueryError::Code::PureNegativeQuery: return "PureNegativeQuery";
  }
  return "?";
}

QueryNode parse_query(std::string_view text) { return Parser(Lexer(text).run()).parse(); }

bool spatial_match(const GeoBoundingBox& record_box, const GeoBoundingBox& query_box,
                   SpatialRelation relation) {
  switch (relation) {
    case SpatialRelation::Intersects:
      for (const auto& a : decompose(record_box)) {
        for (const auto& b : decompose(query_box)) {
          if (overlaps(a, b)) return true;
        }
      }
      return false;
    case SpatialRelation::Contains: return covers(record_box, query_box);
    case SpatialRelation::Within: return covers(query_box, record_box);
  }
  return false;
}

bool temporal_match(const TemporalExtent& record, std::optional<Instant> query_start,
                    std::optional<Instant> query_end) {
  if (record.start && query_end && *record.start > *query_end) return false;
  if (record.end && query_start && *record.end < *query_start) return false;
  return true;
}

}  // namespace mercury
