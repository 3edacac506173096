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
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mercury/record.hpp"
#include "mercury/record_store.hpp"

namespace mercury::oai {

inline constexpr std::string_view kOaiNamespace = "http://www.openarchives.org/OAI/2.0/";
inline constexpr std::string_view kGranularity = "YYYY-MM-DDThh:mm:ssZ";

enum class Verb { Identify, ListMetadataFormats, ListSets, ListIdentifiers, ListRecords, GetRecord };

std::string_view to_string(Verb verb) noexcept;
std::optional<Verb> verb_from_string(std::string_view name) noexcept;

enum class ErrorCode {
  badVerb,
  badArgument,
  badResumptionToken,
  cannotDisseminateFormat,
  idDoesNotExist,
  noRecordsMatch,
  noMetadataFormats,
  noSetHierarchy,
};

std::string_view to_string(ErrorCode code) noexcept;
std::optional<ErrorCode> error_code_from_string(std::string_view name) noexcept;

struct OaiError {
  ErrorCode code;
  std::string message;
};

struct MetadataFormat {
  std::string prefix;
  std::string schema;
  std::string ns;
};

/// oai_dc first, then the native formats.
const std::vector<MetadataFormat>& metadata_formats();
/// The schema served natively under \p prefix; nullopt for oai_dc and
/// unknown prefixes.
std::optional<SchemaKind> native_schema(std::string_view prefix);
/// The native prefix for \p schema, if it has one.
std::optional<std::string_view> native_prefix(SchemaKind schema);

struct SetInfo {
  std::string spec;
  std::string name;
};

struct RepositoryConfig {
  std::string repository_name = "Mercury";
  std::string base_url = "http://localhost:8080/oai";
  std::vector<std::string> admin_emails = {"admin@localhost"};
  std::size_t page_size = 100;
  std::string token_secret = "mercury";
  std::chrono::seconds token_ttl = std::chrono::hours(24);
  bool sets_enabled = true;
  /// Collection tags advertised by ListSets besides the source ids.
  std::vector<SetInfo> collections;
};

struct Header {
  std::string identifier;
  Instant datestamp{};
  bool deleted = false;
  std::vector<std::string> set_specs;
};

struct Record {
  Header header;
  std::string metadata;  // serialized element; empty for deleted records
};

struct ResumptionToken {
  std::string value;  // empty on the last page of a multi-page list
  std::size_t complete_list_size = 0;
  std::size_t cursor = 0;
  std::optional<Instant> expiration;
};

struct IdentifyInfo {
  std::string repository_name;
  std::string base_url;
  std::string protocol_version = "2.0";
  std::vector<std::string> admin_emails;
  Instant earliest_datestamp{};
  std::string deleted_record = "persistent";
  std::string granularity = std::string(kGranularity);
};

struct HeaderList {
  std::vector<Header> headers;
  std::optional<ResumptionToken> token;
};

struct RecordList {
  std::vector<Record> records;
  std::optional<ResumptionToken> token;
};

using Payload = std::variant<IdentifyInfo, std::vector<MetadataFormat>, std::vector<SetInfo>,
                             HeaderList, RecordList, Record, std::vector<OaiError>>;

/// Request echo. Empty (no verb, no arguments) after badVerb or badArgument.
struct RequestEcho {
  std::optional<Verb> verb;
  std::vector<std::pair<std::string, std::string>> arguments;  // protocol order
};

struct OaiResponse {
  Instant response_date{};
  std::string base_url;
  RequestEcho request;
  Payload payload;

  bool is_error() const { return std::holds_alternative<std::vector<OaiError>>(payload); }
  const std::vector<OaiError>& errors() const { return std::get<std::vector<OaiError>>(payload); }
};

using Params = std::vector<std::pair<std::string, std::string>>;

/// Validates and answers one request against a store view. Protocol errors
/// are returned in the payload, never thrown.
OaiResponse handle_request(const Params& params, const StoreView& view,
                           const RepositoryConfig& config, Instant now);

/// Deterministic UTF-8 OAI-PMH XML.
std::string serialize_response(const OaiResponse& response);

/// setSpecs advertised for a record: source id first, then its own sets.
std::vector<std::string> set_specs(const MetadataRecord& record);

/// State carried by a resumption token. The token text is the base64url
/// JSON of this state, a dot, and its base64url HMAC-SHA256.
struct TokenState {
  Verb verb = Verb::ListRecords;
  std::string metadata_prefix;
  std::optional<std::string> from;
  std::optional<std::string> until;
  std::optional<std::string> set;
  std::size_t cursor = 0;
  std::size_t complete_list_size = 0;
  std::string last_identifier;
  std::uint64_t snapshot_seq = 0;
  Instant expiry{};

  friend bool operator==(const TokenState&, const TokenState&) = default;
};

std::string encode_token(const TokenState& state, std::string_view secret);
/// nullopt when the text is malformed or the signature does not verify.
std::optional<TokenState> decode_token(std::string_view token, std::string_view secret);

}  // namespace mercury::oai
