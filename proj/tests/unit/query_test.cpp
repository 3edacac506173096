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

#include "mercury/query.hpp"

using namespace mercury;
using Code = QueryError::Code;
using Strings = std::vector<std::string>;

namespace {

Code error_of(const std::string& q, std::size_t* position = nullptr) {
  try {
    parse_query(q);
  } catch (const QueryError& e) {
    if (position) *position = e.position();
    return e.code();
  }
  FAIL("expected QueryError for " << q);
  return Code::SyntaxError;
}

std::string ast(const std::string& q) { return to_string(parse_query(q)); }

GeoBoundingBox box(double w, double s, double e, double n) { return GeoBoundingBox::from_wsen(w, s, e, n); }

Instant day(const char* s) { return *parse_date(s); }

}  // namespace

TEST_CASE("tokenize") {
  CHECK(tokenize("Net Primary Productivity (NPP)") == Strings{"net", "primary", "productivity", "npp"});
  CHECK(tokenize("CO2-flux 2003") == Strings{"co2", "flux", "2003"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  ...  ").empty());
  CHECK(tokenize("Caf\xC3\x89 \xCE\x94\xCE\xB9\xCE\xBA") == Strings{"caf\xC3\xA9", "\xCE\xB4\xCE\xB9\xCE\xBA"});
  CHECK(tokenize("a\xE2\x80\x94" "b") == Strings{"a", "b"});
}

TEST_CASE("grammar") {
  CHECK(ast("title:eagles OR keywords:raptor") == R"(Or(Term(Title,"eagles"), Term(Keywords,"raptor")))");
  CHECK(ast("soil moisture NOT ocean") ==
        R"(And(Term(All,"soil"), Term(All,"moisture"), Not(Term(All,"ocean"))))");
  CHECK(ast("a b OR c") == R"(Or(And(Term(All,"a"), Term(All,"b")), Term(All,"c")))");
  CHECK(ast("a (b OR c)") == R"(And(Term(All,"a"), Or(Term(All,"b"), Term(All,"c"))))");
  CHECK(ast("a AND b") == R"(And(Term(All,"a"), Term(All,"b")))");
  CHECK(ast("TITLE:\"Soil  Moisture\"") == R"(Phrase(Title,"soil","moisture"))");
  CHECK(ast("CO2-flux") == R"(Phrase(All,"co2","flux"))");
  CHECK(ast("\"eagles\"") == R"(Term(All,"eagles"))");
  CHECK(ast("or and not") == R"(And(Term(All,"or"), Term(All,"and"), Term(All,"not")))");
  CHECK(ast("") == "MatchAll");
  CHECK(ast("   ") == "MatchAll");
  CHECK(ast("*") == "MatchAll");
  CHECK(ast("a NOT (b OR c)") == R"(And(Term(All,"a"), Not(Or(Term(All,"b"), Term(All,"c")))))");
  CHECK(ast("((a))") == R"(Term(All,"a"))");
  CHECK(ast("schema:DublinCore source:ornl") == R"(And(Term(Schema,"dublincore"), Term(Source,"ornl")))");
}

TEST_CASE("grammar errors") {
  std::size_t pos = 99;
  CHECK(error_of("NOT ocean", &pos) == Code::PureNegativeQuery);
  CHECK(pos == 0);
  CHECK(error_of("NOT a NOT b") == Code::PureNegativeQuery);
  CHECK(error_of("a OR NOT b") == Code::PureNegativeQuery);
  CHECK(error_of("a NOT NOT b") == Code::PureNegativeQuery);
  CHECK(error_of("a (NOT b)") == Code::PureNegativeQuery);
  CHECK(error_of("color:red", &pos) == Code::UnknownField);
  CHECK(pos == 0);
  CHECK(error_of("a foo:b", &pos) == Code::UnknownField);
  CHECK(pos == 2);
  CHECK(error_of("(a", &pos) == Code::SyntaxError);
  CHECK(pos == 0);
  CHECK(error_of("a)", &pos) == Code::SyntaxError);
  CHECK(pos == 1);
  CHECK(error_of("\"open phrase", &pos) == Code::SyntaxError);
  CHECK(error_of("a OR") == Code::SyntaxError);
  CHECK(error_of("OR a") == Code::SyntaxError);
  CHECK(error_of("a AND") == Code::SyntaxError);
  CHECK(error_of("NOT") == Code::SyntaxError);
  CHECK(error_of("()") == Code::SyntaxError);
  CHECK(error_of("title:") == Code::SyntaxError);
  CHECK(error_of("\"\"") == Code::SyntaxError);
  CHECK(error_of("a -- b", &pos) == Code::SyntaxError);
  CHECK(pos == 2);
}

TEST_CASE("spatial relations") {
  CHECK(spatial_match(box(-100, 30, -90, 40), box(-95, 35, -85, 45), SpatialRelation::Intersects));
  CHECK(spatial_match(box(170, -5, -170, 5), box(172, -10, 179, 10), SpatialRelation::Intersects));
  CHECK(spatial_match(box(170, -5, -170, 5), box(-175, -1, -172, 1), SpatialRelation::Intersects));
  CHECK_FALSE(spatial_match(box(170, -5, -170, 5), box(-160, -1, 160, 1), SpatialRelation::Intersects));
  CHECK(spatial_match(box(0, 0, 10, 10), box(-1, -1, 11, 11), SpatialRelation::Within));
  CHECK_FALSE(spatial_match(box(0, 0, 10, 10), box(-1, -1, 11, 11), SpatialRelation::Contains));
  CHECK(spatial_match(box(-1, -1, 11, 11), box(0, 0, 10, 10), SpatialRelation::Contains));
  CHECK(spatial_match(box(160, -10, -160, 10), box(170, -5, -170, 5), SpatialRelation::Contains));
  CHECK_FALSE(spatial_match(box(160, -10, -160, 10), box(150, -5, -170, 5), SpatialRelation::Contains));
  CHECK(spatial_match(box(-180, -90, 180, 90), box(170, -5, -170, 5), SpatialRelation::Contains));
  CHECK(spatial_match(box(0, 0, 10, 10), box(10, 10, 20, 20), SpatialRelation::Intersects));
  CHECK_FALSE(spatial_match(box(0, 0, 10, 10), box(0, 11, 10, 20), SpatialRelation::Intersects));
}

TEST_CASE("temporal overlap") {
  auto closed = TemporalExtent::make(day("2000-01-01"), day("2000-12-31"));
  CHECK(temporal_match(closed, day("2000-06-01"), day("2001-06-01")));
  CHECK(temporal_match(closed, day("2000-12-31"), std::nullopt));
  CHECK_FALSE(temporal_match(closed, day("2001-01-01"), std::nullopt));
  auto open_end = TemporalExtent::make(day("2002-01-01"), std::nullopt);
  CHECK_FALSE(temporal_match(open_end, std::nullopt, day("2001-12-31")));
  CHECK(temporal_match(open_end, std::nullopt, day("2002-01-01")));
  auto open_start = TemporalExtent::make(std::nullopt, day("2005-01-01"));
  CHECK(temporal_match(open_start, day("2004-01-01"), std::nullopt));
  CHECK_FALSE(temporal_match(open_start, day("2005-01-02"), std::nullopt));
}
