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

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "mercury/http_client.hpp"
#include "mercury/oaipmh.hpp"

namespace mercury::oai {

/// An in-band OAI-PMH error other than noRecordsMatch.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Non-XML, non-OAI or structurally broken response, or a non-200 status.
class MalformedResponse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HarvestedRecord {
  Header header;
  /// The metadata element as a standalone document; empty when deleted.
  std::string document;
};

struct ListRequest {
  std::string base_url;
  std::string metadata_prefix = "oai_dc";
  std::optional<Instant> from;
  std::optional<Instant> until;
  std::optional<std::string> set;
};

/// Parses one response body. Throws MalformedResponse.
OaiResponse parse_response(std::string_view body);

class Client {
 public:
  explicit Client(net::HttpClient& http, net::RetryPolicy retry = {}) : http_(http), retry_(std::move(retry)) {}

  /// Throws ProtocolError, net::TransportError, MalformedResponse.
  IdentifyInfo identify(const std::string& base_url);

  /// Issues ListRecords and follows resumption tokens to exhaustion, calling
  /// \p sink once per record in provider order. Calls Identify first to pick
  /// the datestamp granularity for from/until. noRecordsMatch yields nothing.
  /// Returns the number of records delivered.
  std::size_t list_records(const ListRequest& request, const std::function<void(HarvestedRecord&&)>& sink);

 private:
  OaiResponse call(const std::string& base_url, const Params& params);

  net::HttpClient& http_;
  net::RetryPolicy retry_;
};

}  // namespace mercury::oai
