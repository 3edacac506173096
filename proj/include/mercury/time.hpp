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

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace mercury {

/// UTC instant with one-second resolution. Day-granular dates are stored as
/// the instant at 00:00:00Z of that day.
using Instant = std::chrono::sys_seconds;

/// Granularity of a parsed date string.
enum class DateGranularity { Day, Second };

struct ParsedDate {
  Instant instant;
  DateGranularity granularity;
};

/// Strict OAI-PMH datestamp: "YYYY-MM-DD" or "YYYY-MM-DDThh:mm:ssZ".
std::optional<ParsedDate> parse_oai_datestamp(std::string_view text);

/// Lenient date parser used for metadata content and API parameters.
///
/// Accepts "YYYY", "YYYY-MM", "YYYY-MM-DD", "YYYYMM", "YYYYMMDD", and
/// "YYYY-MM-DDThh:mm[:ss[.fff]]" with an optional "Z" or "+hh:mm" offset.
/// Partial dates resolve to their first day. Returns nullopt for anything
/// else, including impossible calendar dates such as 2003-02-30.
std::optional<Instant> parse_date(std::string_view text);

/// "YYYY-MM-DDThh:mm:ssZ".
std::string format_utc(Instant t);
/// "YYYY-MM-DD".
std::string format_day(Instant t);
/// RFC 822 date as used by RSS 2.0, e.g. "Sun, 15 Jun 2003 00:00:00 +0000".
std::string format_rfc822(Instant t);
/// HTTP-date ("Sun, 06 Nov 1994 08:49:37 GMT") or the RFC 822 form above.
std::optional<Instant> parse_http_date(std::string_view text);

Instant now_utc();
Instant start_of_day(Instant t);

}  // namespace mercury
