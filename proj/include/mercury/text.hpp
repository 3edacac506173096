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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mercury::text {

// ASCII whitespace only; metadata files rarely carry anything else between
// words and treating U+00A0 as a separator would change stored titles.
bool is_space(char c) noexcept;

std::string_view trim(std::string_view s) noexcept;

// Trims and collapses every run of whitespace into a single space.
std::string collapse_whitespace(std::string_view s);

// Decodes UTF-8 leniently: malformed sequences decode to U+FFFD one byte at
// a time, so any byte string is accepted.
std::vector<char32_t> decode_utf8(std::string_view s);
void append_utf8(std::string& out, char32_t cp);

char32_t to_lower(char32_t cp) noexcept;
bool is_alnum(char32_t cp) noexcept;

std::string to_lower_utf8(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

std::string base64_encode(std::string_view bytes);
// Throws std::invalid_argument on malformed input.
std::string base64_decode(std::string_view text);

// URL-safe, unpadded variant used in opaque tokens.
std::string base64url_encode(std::string_view bytes);
std::string base64url_decode(std::string_view text);

std::string hex_encode(const std::uint8_t* data, std::size_t size);

std::vector<std::string> split(std::string_view s, char sep);

bool starts_with_ci(std::string_view s, std::string_view prefix);

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace mercury::text
