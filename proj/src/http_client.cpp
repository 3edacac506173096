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

#include "mercury/http_client.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <thread>

#include <httplib.h>

namespace mercury::net {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool retryable(int status) { return status == 429 || status >= 500; }

std::optional<std::chrono::seconds> retry_after(const HttpResponse& r) {
  const std::string* v = r.header("retry-after");
  if (v == nullptr) return std::nullopt;
  long long secs = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), secs);
  if (ec != std::errc() || ptr != v->data() + v->size() || secs < 0) return std::nullopt;
  return std::chrono::seconds(secs);
}

}  // namespace

const std::string* HttpResponse::header(const std::string& lower_name) const {
  auto it = headers.find(lower_name);
  return it == headers.end() ? nullptr : &it->second;
}

HttplibClient::HttplibClient(std::chrono::seconds timeout) : timeout_(timeout) {}

HttpResponse HttplibClient::get(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("not an absolute URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  if (!client.is_valid()) throw TransportError("unsupported URL: " + url);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);
  auto result = client.Get(path);
  if (!result) throw TransportError("GET " + url + ": " + httplib::to_string(result.error()));

  HttpResponse out;
  out.status = result->status;
  out.body = std::move(result->body);
  for (const auto& [k, v] : result->headers) out.headers.emplace(lower(k), v);
  return out;
}

void WireLog::append(WireEntry entry) {
  std::lock_guard lock(mutex_);
  entries_.push_back(std::move(entry));
}

std::vector<WireEntry> WireLog::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

void WireLog::clear() {
  std::lock_guard lock(mutex_);
  entries_.clear();
}

HttpResponse LoggingClient::get(const std::string& url) {
  try {
    auto r = inner_.get(url);
    log_.append({url, r.status, r.body.size(), keep_bodies_ ? r.body : std::string()});
    return r;
  } catch (const TransportError&) {
    log_.append({url, 0, 0, {}});
    throw;
  }
}

HttpResponse fetch_with_retry(HttpClient& client, const std::string& url, const RetryPolicy& policy) {
  auto sleep = policy.sleep ? policy.sleep : [](std::chrono::seconds d) { std::this_thread::sleep_for(d); };
  for (std::size_t attempt = 0;; ++attempt) {
    std::optional<HttpResponse> response;
    std::string failure;
    try {
      response = client.get(url);
      if (!retryable(response->status)) return std::move(*response);
    } catch (const TransportError& e) {
      failure = e.what();
    }
    if (attempt >= policy.delays.size()) {
      if (response) return std::move(*response);
      throw TransportError(failure + " (after " + std::to_string(attempt + 1) + " attempts)");
    }
    auto delay = policy.delays[attempt];
    if (response) {
      if (auto hinted = retry_after(*response)) delay = std::min(*hinted, policy.max_retry_after);
    }
    sleep(delay);
  }
}

std::string with_query(const std::string& base, const std::vector<std::pair<std::string, std::string>>& params) {
  std::string out = base;
  char sep = base.find('?') == std::string::npos ? '?' : '&';
  for (const auto& [k, v] : params) {
    out += sep;
    out += httplib::detail::encode_query_param(k);
    out += '=';
    out += httplib::detail::encode_query_param(v);
    sep = '&';
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_query(std::string_view query) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t start = 0;
  while (start <= query.size()) {
    auto end = query.find('&', start);
    if (end == std::string_view::npos) end = query.size();
    std::string_view pair = query.substr(start, end - start);
    if (!pair.empty()) {
      auto eq = pair.find('=');
      std::string key(pair.substr(0, eq));
      std::string value(eq == std::string_view::npos ? std::string_view() : pair.substr(eq + 1));
      out.emplace_back(httplib::detail::decode_url(key, true), httplib::detail::decode_url(value, true));
    }
    start = end + 1;
  }
  return out;
}

}  // namespace mercury::net
