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
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mercury::net {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HttpResponse {
  int status = 0;
  std::string body;
  /// Header names lower-cased.
  std::map<std::string, std::string> headers;

  const std::string* header(const std::string& lower_name) const;
};

class HttpClient {
 public:
  virtual ~HttpClient() = default;
  /// Throws TransportError when no HTTP response was received.
  virtual HttpResponse get(const std::string& url) = 0;
};

/// HTTP/1.1 client for http:// and https:// URLs.
class HttplibClient final : public HttpClient {
 public:
  explicit HttplibClient(std::chrono::seconds timeout = std::chrono::seconds(30));
  HttpResponse get(const std::string& url) override;

 private:
  std::chrono::seconds timeout_;
};

struct WireEntry {
  std::string url;
  int status = 0;  // 0 on transport failure
  std::size_t bytes = 0;
  std::string body;
};

/// Thread-safe record of every request made through a LoggingClient.
class WireLog {
 public:
  void append(WireEntry entry);
  std::vector<WireEntry> entries() const;
  void clear();

 private:
  mutable std::mutex mutex_;
  std::vector<WireEntry> entries_;
};

class LoggingClient final : public HttpClient {
 public:
  LoggingClient(HttpClient& inner, WireLog& log, bool keep_bodies = true)
      : inner_(inner), log_(log), keep_bodies_(keep_bodies) {}
  HttpResponse get(const std::string& url) override;

 private:
  HttpClient& inner_;
  WireLog& log_;
  bool keep_bodies_;
};

struct RetryPolicy {
  /// One entry per retry after the initial attempt.
  std::vector<std::chrono::seconds> delays = {std::chrono::seconds(1), std::chrono::seconds(2),
                                              std::chrono::seconds(4)};
  std::chrono::seconds max_retry_after = std::chrono::seconds(60);
  std::function<void(std::chrono::seconds)> sleep;  // defaults to this_thread::sleep_for
};

/// GET with retries on transport failures, 5xx and 429. A Retry-After
/// header (delta seconds) replaces the scheduled delay, capped at
/// max_retry_after. Returns the final response, which may still be an error
/// status; throws TransportError when the last attempt got no response.
HttpResponse fetch_with_retry(HttpClient& client, const std::string& url, const RetryPolicy& policy = {});

/// Appends form-encoded query parameters to \p base.
std::string with_query(const std::string& base, const std::vector<std::pair<std::string, std::string>>& params);

/// Splits a form-encoded query string, keeping order and repeated keys.
std::vector<std::pair<std::string, std::string>> parse_query(std::string_view query);

}  // namespace mercury::net
