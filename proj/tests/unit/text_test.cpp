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

#include "mercury/text.hpp"

using namespace mercury::text;

TEST_CASE("collapse_whitespace trims and joins runs") {
  CHECK(collapse_whitespace("  Net  Primary\tProductivity ") == "Net Primary Productivity");
  CHECK(collapse_whitespace("") == "");
  CHECK(collapse_whitespace(" \n\t ") == "");
  CHECK(collapse_whitespace("a\r\nb") == "a b");
}

TEST_CASE("utf8 decode is lenient and round-trips valid input") {
  std::string s = "caf\xC3\xA9 \xE2\x82\xAC \xF0\x9F\x8C\x8D";
  std::string out;
  for (char32_t cp : decode_utf8(s)) append_utf8(out, cp);
  CHECK(out == s);

  auto bad = decode_utf8("a\xFF" "b");
  REQUIRE(bad.size() == 3);
  CHECK(bad[1] == U'�');
  auto truncated = decode_utf8("x\xE2\x82");
  CHECK(truncated.back() == U'�');
}

TEST_CASE("lowercasing covers non-ASCII letters") {
  CHECK(to_lower_utf8("\xC3\x89T\xC3\x89") == "\xC3\xA9t\xC3\xA9");
  CHECK(to_lower_utf8("\xCE\x94\xCE\x9B") == "\xCE\xB4\xCE\xBB");
  CHECK(to_lower_utf8("\xD0\x9C\xD0\x98\xD0\xA0") == "\xD0\xBC\xD0\xB8\xD1\x80");
  CHECK(iequals("NPP", "npp"));
  CHECK_FALSE(iequals("npp", "npq"));
}

TEST_CASE("alnum classification") {
  CHECK(is_alnum(U'a'));
  CHECK(is_alnum(U'7'));
  CHECK(is_alnum(U'é'));
  CHECK_FALSE(is_alnum(U'-'));
  CHECK_FALSE(is_alnum(U' '));
  CHECK_FALSE(is_alnum(U'…'));
}

TEST_CASE("base64 variants") {
  CHECK(base64_encode("") == "");
  CHECK(base64_encode("f") == "Zg==");
  CHECK(base64_encode("foobar") == "Zm9vYmFy");
  CHECK(base64_decode("Zm9vYg==") == "foob");
  std::string bin("\xFB\xFF\x00\x01", 4);
  CHECK(base64url_decode(base64url_encode(bin)) == bin);
  CHECK(base64url_encode(bin).find_first_of("+/=") == std::string::npos);
}

TEST_CASE("format_double gives shortest round-trip text") {
  CHECK(format_double(-100) == "-100");
  CHECK(format_double(170.5) == "170.5");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("split keeps empty fields") {
  auto parts = split("a,,b", ',');
  REQUIRE(parts.size() == 3);
  CHECK(parts[1].empty());
}
