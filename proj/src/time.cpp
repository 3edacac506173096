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

#include "mercury/time.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

namespace mercury {

namespace {

using namespace std::chrono;

bool read_digits(std::string_view s, std::size_t pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < count; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

std::optional<sys_days> make_day(int y, int m, int d) {
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

// Parses "hh:mm[:ss[.fff]][Z|+hh:mm|-hh:mm]" starting at pos; returns the
// offset from midnight in seconds, already shifted to UTC.
std::optional<long> parse_time_of_day(std::string_view s, std::size_t pos) {
  int hh = 0, mm = 0, ss = 0;
  if (!read_digits(s, pos, 2, hh) || pos + 2 >= s.size() || s[pos + 2] != ':' ||
      !read_digits(s, pos + 3, 2, mm)) {
    return std::nullopt;
  }
  pos += 5;
  if (pos < s.size() && s[pos] == ':') {
    if (!read_digits(s, pos + 1, 2, ss)) return std::nullopt;
    pos += 3;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      std::size_t start = pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
      if (pos == start) return std::nullopt;
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  long seconds = hh * 3600L + mm * 60L + (ss == 60 ? 59 : ss);
  if (pos == s.size()) return seconds;
  if (s[pos] == 'Z' && pos + 1 == s.size()) return seconds;
  if (s[pos] == '+' || s[pos] == '-') {
    int oh = 0, om = 0;
    if (!read_digits(s, pos + 1, 2, oh)) return std::nullopt;
    std::size_t next = pos + 3;
    if (next < s.size() && s[next] == ':') ++next;
    if (!read_digits(s, next, 2, om) || next + 2 != s.size()) return std::nullopt;
    if (oh > 23 || om > 59) return std::nullopt;
    long offset = oh * 3600L + om * 60L;
    return s[pos] == '+' ? seconds - offset : seconds + offset;
  }
  return std::nullopt;
}

}  // namespace

std::optional<ParsedDate> parse_oai_datestamp(std::string_view s) {
  int y = 0, m = 0, d = 0;
  if (s.size() != 10 && s.size() != 20) return std::nullopt;
  if (!read_digits(s, 0, 4, y) || s[4] != '-' || !read_digits(s, 5, 2, m) || s[7] != '-' ||
      !read_digits(s, 8, 2, d)) {
    return std::nullopt;
  }
  auto day = make_day(y, m, d);
  if (!day) return std::nullopt;
  if (s.size() == 10) return ParsedDate{Instant{*day}, DateGranularity::Day};
  int hh = 0, mm = 0, ss = 0;
  if (s[10] != 'T' || !read_digits(s, 11, 2, hh) || s[13] != ':' || !read_digits(s, 14, 2, mm) ||
      s[16] != ':' || !read_digits(s, 17, 2, ss) || s[19] != 'Z') {
    return std::nullopt;
  }
  if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
  return ParsedDate{Instant{*day} + hours{hh} + minutes{mm} + seconds{ss},
                    DateGranularity::Second};
}

std::optional<Instant> parse_date(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  int y = 0, m = 1, d = 1;
  if (!read_digits(s, 0, 4, y)) return std::nullopt;
  if (s.size() == 4) return Instant{*make_day(y, 1, 1)};

  std::size_t pos = 4;
  if (s[4] == '-') {
    if (!read_digits(s, 5, 2, m)) return std::nullopt;
    pos = 7;
    if (pos < s.size()) {
      if (s[pos] != '-' || !read_digits(s, 8, 2, d)) return std::nullopt;
      pos = 10;
    }
  } else {
    // Compact forms: YYYYMM or YYYYMMDD.
    if (s.size() != 6 && s.size() != 8) return std::nullopt;
    if (!read_digits(s, 4, 2, m)) return std::nullopt;
    if (s.size() == 8 && !read_digits(s, 6, 2, d)) return std::nullopt;
    pos = s.size();
  }
  auto day = make_day(y, m, d);
  if (!day) return std::nullopt;
  if (pos == s.size()) return Instant{*day};
  if (pos != 10 || (s[pos] != 'T' && s[pos] != ' ')) return std::nullopt;
  auto tod = parse_time_of_day(s, pos + 1);
  if (!tod) return std::nullopt;
  return Instant{*day} + seconds{*tod};
}

std::string format_utc(Instant t) {
  auto day = floor<days>(t);
  year_month_day ymd{day};
  hh_mm_ss hms{t - day};
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), long(hms.hours().count()),
                long(hms.minutes().count()), static_cast<long long>(hms.seconds().count()));
  return buf.data();
}

std::string format_day(Instant t) {
  year_month_day ymd{floor<days>(t)};
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf.data();
}

std::string format_rfc822(Instant t) {
  static constexpr std::array<const char*, 7> kWeekdays = {"Sun", "Mon", "Tue", "Wed",
                                                           "Thu", "Fri", "Sat"};
  static constexpr std::array<const char*, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                          "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  auto day = floor<days>(t);
  year_month_day ymd{day};
  weekday wd{day};
  hh_mm_ss hms{t - day};
  std::array<char, 96> buf{};
  std::snprintf(buf.data(), buf.size(), "%s, %02u %s %04d %02ld:%02ld:%02lld +0000",
                kWeekdays[wd.c_encoding()], unsigned(ymd.day()), kMonths[unsigned(ymd.month()) - 1],
                int(ymd.year()), long(hms.hours().count()), long(hms.minutes().count()),
                static_cast<long long>(hms.seconds().count()));
  return buf.data();
}

std::optional<Instant> parse_http_date(std::string_view text) {
  static constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                               "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  auto comma = text.find(", ");
  if (comma == std::string_view::npos) return std::nullopt;
  std::string rest(text.substr(comma + 2));
  unsigned d = 0;
  char mon[4] = {};
  int y = 0, hh = 0, mm = 0, ss = 0;
  char zone[8] = {};
  if (std::sscanf(rest.c_str(), "%u %3s %d %d:%d:%d %7s", &d, mon, &y, &hh, &mm, &ss, zone) != 7) {
    return std::nullopt;
  }
  if (std::string_view(zone) != "GMT" && std::string_view(zone) != "+0000" && std::string_view(zone) != "UTC") {
    return std::nullopt;
  }
  auto it = std::find(kMonths.begin(), kMonths.end(), std::string_view(mon));
  if (it == kMonths.end()) return std::nullopt;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(it - kMonths.begin() + 1)}, day{d}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60 || hh < 0 || mm < 0 || ss < 0) return std::nullopt;
  return Instant{sys_days{ymd}} + hours{hh} + minutes{mm} + seconds{ss};
}

Instant now_utc() { return floor<seconds>(system_clock::now()); }

Instant start_of_day(Instant t) { return Instant{floor<days>(t)}; }

}  // namespace mercury
