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

#include "mercury/oaipmh.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "mercury/crosswalk.hpp"
#include "mercury/text.hpp"
#include "mercury/xml.hpp"

namespace mercury::oai {

namespace {

constexpr std::array<std::string_view, 6> kVerbNames = {
    "Identify", "ListMetadataFormats", "ListSets", "ListIdentifiers", "ListRecords", "GetRecord"};

constexpr std::array<std::string_view, 8> kErrorNames = {
    "badVerb",        "badArgument",     "badResumptionToken", "cannotDisseminateFormat",
    "idDoesNotExist", "noRecordsMatch", "noMetadataFormats",  "noSetHierarchy"};

// Protocol argument order, used for the request echo.
constexpr std::array<std::string_view, 6> kArgumentOrder = {
    "identifier", "metadataPrefix", "from", "until", "set", "resumptionToken"};

struct ArgumentRules {
  std::vector<std::string_view> required;
  std::vector<std::string_view> optional;
  bool resumable;
};

ArgumentRules rules_for(Verb verb) {
  switch (verb) {
    case Verb::Identify: return {{}, {}, false};
    case Verb::ListMetadataFormats: return {{}, {"identifier"}, false};
    case Verb::ListSets: return {{}, {}, true};
    case Verb::ListIdentifiers:
    case Verb::ListRecords: return {{"metadataPrefix"}, {"from", "until", "set"}, true};
    case Verb::GetRecord: return {{"identifier", "metadataPrefix"}, {}, false};
  }
  return {};
}

bool contains(const std::vector<std::string_view>& v, std::string_view s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

class Failure {
 public:
  Failure(ErrorCode code, std::string message) : error{code, std::move(message)} {}
  OaiError error;
};

std::string hmac_b64(std::string_view data, std::string_view secret) {
  unsigned char mac[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  HMAC(EVP_sha256(), secret.data(), static_cast<int>(secret.size()),
       reinterpret_cast<const unsigned char*>(data.data()), data.size(), mac, &len);
  return text::base64url_encode(std::string_view(reinterpret_cast<const char*>(mac), len));
}

bool in_set(const std::vector<std::string>& specs, std::string_view set) {
  return std::any_of(specs.begin(), specs.end(), [&](const std::string& s) {
    return s == set || (s.size() > set.size() && s.starts_with(set) && s[set.size()] == ':');
  });
}

Header make_header(const MetadataRecord& r) { return {r.identifier, r.datestamp, r.deleted, set_specs(r)}; }

/// Markup for embedding under <metadata>, or nullopt when \p r cannot be
/// disseminated as \p prefix.
std::optional<std::string> disseminate(const MetadataRecord& r, std::string_view prefix) {
  if (prefix == "oai_dc") return crosswalk::to_oai_dc(r);
  auto schema = native_schema(prefix);
  if (!schema || *schema != r.schema) return std::nullopt;
  try {
    auto root = xml::parse(r.raw_document);
    // Unprefixed roots without a namespace must not inherit the OAI one.
    if (root.prefix.empty() && root.attribute("xmlns") == nullptr) {
      root.attributes.insert(root.attributes.begin(), {"xmlns", ""});
    }
    return xml::serialize(root);
  } catch (const xml::XmlError&) {
    return std::nullopt;
  }
}

bool available_as(const MetadataRecord& r, std::string_view prefix) {
  if (prefix == "oai_dc") return true;
  auto schema = native_schema(prefix);
  if (!schema || *schema != r.schema) return false;
  return r.deleted || disseminate(r, prefix).has_value();
}

struct Window {
  std::optional<Instant> from;
  std::optional<Instant> until;  // inclusive
};

Window parse_window(const std::optional<std::string>& from, const std::optional<std::string>& until) {
  Window w;
  std::optional<ParsedDate> f, u;
  if (from) {
    f = parse_oai_datestamp(*from);
    if (!f) throw Failure(ErrorCode::badArgument, "illegal from date '" + *from + "'");
  }
  if (until) {
    u = parse_oai_datestamp(*until);
    if (!u) throw Failure(ErrorCode::badArgument, "illegal until date '" + *until + "'");
  }
  if (f && u) {
    if (f->granularity != u->granularity) {
      throw Failure(ErrorCode::badArgument, "from and until have different granularities");
    }
    if (f->instant > u->instant) throw Failure(ErrorCode::badArgument, "from is later than until");
  }
  if (f) w.from = f->instant;
  if (u) {
    w.until = u->granularity == DateGranularity::Day
                  ? u->instant + std::chrono::hours(24) - std::chrono::seconds(1)
                  : u->instant;
  }
  return w;
}

class Handler {
 public:
  Handler(const Params& params, const StoreView& view, const RepositoryConfig& config, Instant now)
      : params_(params), view_(view), config_(config), now_(now) {}

  OaiResponse run() {
    OaiResponse response;
    response.response_date = now_;
    response.base_url = config_.base_url;
    try {
      auto verb = validate();
      response.request = echo(verb);
      try {
        response.payload = dispatch(verb);
      } catch (const Failure& f) {
        response.payload = std::vector<OaiError>{f.error};
      }
    } catch (const Failure& f) {
      response.payload = std::vector<OaiError>{f.error};
    }
    return response;
  }

 private:
  Verb validate() {
    std::vector<std::string_view> verbs;
    for (const auto& [k, v] : params_) {
      if (k == "verb") verbs.push_back(v);
    }
    if (verbs.empty()) throw Failure(ErrorCode::badVerb, "missing verb argument");
    if (verbs.size() > 1) throw Failure(ErrorCode::badVerb, "verb argument repeated");
    auto verb = verb_from_string(verbs.front());
    if (!verb) throw Failure(ErrorCode::badVerb, "illegal verb '" + std::string(verbs.front()) + "'");

    auto rules = rules_for(*verb);
    for (const auto& [k, v] : params_) {
      if (k == "verb") continue;
      if (args_.count(k) > 0) throw Failure(ErrorCode::badArgument, "argument '" + k + "' repeated");
      bool known = contains(rules.required, k) || contains(rules.optional, k) ||
                   (rules.resumable && k == "resumptionToken");
      if (!known) {
        throw Failure(ErrorCode::badArgument,
                      "argument '" + k + "' is not allowed for " + std::string(to_string(*verb)));
      }
      args_[k] = v;
    }
    if (args_.count("resumptionToken") > 0) {
      if (args_.size() > 1) {
        throw Failure(ErrorCode::badArgument, "resumptionToken is an exclusive argument");
      }
    } else {
      for (auto req : rules.required) {
        if (args_.count(std::string(req)) == 0) {
          throw Failure(ErrorCode::badArgument, "missing required argument '" + std::string(req) + "'");
        }
      }
    }
    if (*verb == Verb::ListIdentifiers || *verb == Verb::ListRecords) {
      parse_window(arg("from"), arg("until"));
    }
    return *verb;
  }

  RequestEcho echo(Verb verb) const {
    RequestEcho e;
    e.verb = verb;
    for (auto name : kArgumentOrder) {
      auto it = args_.find(std::string(name));
      if (it != args_.end()) e.arguments.emplace_back(it->first, it->second);
    }
    return e;
  }

  std::optional<std::string> arg(const std::string& name) const {
    auto it = args_.find(name);
    return it == args_.end() ? std::nullopt : std::optional<std::string>(it->second);
  }

  Payload dispatch(Verb verb) {
    switch (verb) {
      case Verb::Identify: return identify();
      case Verb::ListMetadataFormats: return list_formats();
      case Verb::ListSets: return list_sets();
      case Verb::GetRecord: return get_record();
      case Verb::ListIdentifiers:
      case Verb::ListRecords: return list(verb);
    }
    throw Failure(ErrorCode::badVerb, "unsupported verb");
  }

  IdentifyInfo identify() const {
    IdentifyInfo info;
    info.repository_name = config_.repository_name;
    info.base_url = config_.base_url;
    info.admin_emails = config_.admin_emails;
    info.earliest_datestamp = view_.earliest_datestamp().value_or(Instant{});
    return info;
  }

  const MetadataRecord& lookup(const std::string& identifier) const {
    const StoredRecord* entry = view_.find(identifier);
    if (entry == nullptr) throw Failure(ErrorCode::idDoesNotExist, "unknown identifier '" + identifier + "'");
    return *entry->record;
  }

  std::vector<MetadataFormat> list_formats() const {
    auto id = arg("identifier");
    if (!id) return metadata_formats();
    const MetadataRecord& r = lookup(*id);
    if (r.deleted) throw Failure(ErrorCode::noMetadataFormats, "record '" + *id + "' is deleted");
    std::vector<MetadataFormat> out;
    for (const auto& f : metadata_formats()) {
      if (available_as(r, f.prefix)) out.push_back(f);
    }
    if (out.empty()) throw Failure(ErrorCode::noMetadataFormats, "no formats for '" + *id + "'");
    return out;
  }

  std::vector<SetInfo> list_sets() const {
    if (!config_.sets_enabled) throw Failure(ErrorCode::noSetHierarchy, "this repository does not support sets");
    if (arg("resumptionToken")) {
      throw Failure(ErrorCode::badResumptionToken, "ListSets is never split across responses");
    }
    std::map<std::string, std::string> sets;
    for (const auto& [id, entry] : view_.entries()) {
      for (const auto& spec : set_specs(*entry.record)) sets.emplace(spec, spec);
    }
    for (const auto& c : config_.collections) sets[c.spec] = c.name.empty() ? c.spec : c.name;
    std::vector<SetInfo> out;
    for (auto& [spec, name] : sets) out.push_back({spec, name});
    return out;
  }

  void check_prefix(const std::string& prefix) const {
    bool known = std::any_of(metadata_formats().begin(), metadata_formats().end(),
                             [&](const MetadataFormat& f) { return f.prefix == prefix; });
    if (!known) {
      throw Failure(ErrorCode::cannotDisseminateFormat, "metadata format '" + prefix + "' is not supported");
    }
  }

  Record get_record() const {
    auto prefix = *arg("metadataPrefix");
    check_prefix(prefix);
    const MetadataRecord& r = lookup(*arg("identifier"));
    if (!available_as(r, prefix)) {
      throw Failure(ErrorCode::cannotDisseminateFormat,
                    "record '" + r.identifier + "' is not available as '" + prefix + "'");
    }
    Record out{make_header(r), {}};
    if (!r.deleted) out.metadata = *disseminate(r, prefix);
    return out;
  }

  Payload list(Verb verb) {
    TokenState state;
    bool resumed = false;
    if (auto token = arg("resumptionToken")) {
      auto decoded = decode_token(*token, config_.token_secret);
      if (!decoded || decoded->verb != verb) {
        throw Failure(ErrorCode::badResumptionToken, "invalid resumption token");
      }
      if (decoded->expiry < now_) throw Failure(ErrorCode::badResumptionToken, "resumption token expired");
      state = std::move(*decoded);
      resumed = true;
    } else {
      state.verb = verb;
      state.metadata_prefix = *arg("metadataPrefix");
      state.from = arg("from");
      state.until = arg("until");
      state.set = arg("set");
      state.snapshot_seq = view_.seq();
    }
    check_prefix(state.metadata_prefix);
    if (state.set && !config_.sets_enabled) {
      throw Failure(ErrorCode::noSetHierarchy, "this repository does not support sets");
    }
    Window window = parse_window(state.from, state.until);

    auto selected = [&](const StoredRecord& entry) {
      const MetadataRecord& r = *entry.record;
      if (entry.created_seq > state.snapshot_seq) return false;
      if (window.from && r.datestamp < *window.from) return false;
      if (window.until && r.datestamp > *window.until) return false;
      if (state.set && !in_set(set_specs(r), *state.set)) return false;
      return available_as(r, state.metadata_prefix);
    };

    const auto& entries = view_.entries();
    if (!resumed) {
      state.complete_list_size = static_cast<std::size_t>(
          std::count_if(entries.begin(), entries.end(), [&](const auto& kv) { return selected(kv.second); }));
      if (state.complete_list_size == 0) {
        throw Failure(ErrorCode::noRecordsMatch, "no records match the request");
      }
    }

    std::vector<const MetadataRecord*> page;
    auto it = resumed ? entries.upper_bound(state.last_identifier) : entries.begin();
    for (; it != entries.end() && page.size() < config_.page_size; ++it) {
      if (selected(it->second)) page.push_back(it->second.record.get());
    }
    bool more = false;
    for (; it != entries.end(); ++it) {
      if (selected(it->second)) {
        more = true;
        break;
      }
    }

    std::optional<ResumptionToken> token;
    if (more || resumed) {
      ResumptionToken t;
      t.complete_list_size = state.complete_list_size;
      t.cursor = state.cursor;
      if (more) {
        TokenState next = state;
        next.cursor = state.cursor + page.size();
        next.last_identifier = page.empty() ? state.last_identifier : page.back()->identifier;
        next.expiry = now_ + config_.token_ttl;
        t.value = encode_token(next, config_.token_secret);
        t.expiration = next.expiry;
      }
      token = std::move(t);
    }

    if (verb == Verb::ListIdentifiers) {
      HeaderList out;
      for (const auto* r : page) out.headers.push_back(make_header(*r));
      out.token = std::move(token);
      return out;
    }
    RecordList out;
    for (const auto* r : page) {
      Record rec{make_header(*r), {}};
      if (!r->deleted) rec.metadata = *disseminate(*r, state.metadata_prefix);
      out.records.push_back(std::move(rec));
    }
    out.token = std::move(token);
    return out;
  }

  const Params& params_;
  const StoreView& view_;
  const RepositoryConfig& config_;
  Instant now_;
  std::map<std::string, std::string> args_;
};

void write_header(xml::Writer& w, const Header& h) {
  if (h.deleted) {
    w.open("header", {{"status", "deleted"}});
  } else {
    w.open("header");
  }
  w.leaf("identifier", h.identifier);
  w.leaf("datestamp", format_utc(h.datestamp));
  for (const auto& s : h.set_specs) w.leaf("setSpec", s);
  w.close();
}

void write_record(xml::Writer& w, const Record& r) {
  w.open("record");
  write_header(w, r.header);
  if (!r.header.deleted) {
    w.open("metadata");
    w.raw(r.metadata);
    w.close();
  }
  w.close();
}

}  // namespace

std::string_view to_string(Verb verb) noexcept { return kVerbNames[static_cast<std::size_t>(verb)]; }

std::optional<Verb> verb_from_string(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kVerbNames.size(); ++i) {
    if (kVerbNames[i] == name) return static_cast<Verb>(i);
  }
  return std::nullopt;
}

std::string_view to_string(ErrorCode code) noexcept { return kErrorNames[static_cast<std::size_t>(code)]; }

std::optional<ErrorCode> error_code_from_string(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kErrorNames.size(); ++i) {
    if (kErrorNames[i] == name) return static_cast<ErrorCode>(i);
  }
  return std::nullopt;
}

const std::vector<MetadataFormat>& metadata_formats() {
  static const std::vector<MetadataFormat> formats = {
      {"oai_dc", "http://www.openarchives.org/OAI/2.0/oai_dc.xsd", std::string(crosswalk::kOaiDcNamespace)},
      {"fgdc", "http://www.fgdc.gov/metadata/fgdc-std-001-1998.xsd", ""},
      {"eml", "https://eml.ecoinformatics.org/eml-2.1.1/eml.xsd", "eml://ecoinformatics.org/eml-2.1.1"},
      {"dif", "http://gcmd.gsfc.nasa.gov/Aboutus/xml/dif/dif_v9.8.4.xsd",
       std::string(crosswalk::kDifNamespace)},
      {"iso19139", "http://www.isotc211.org/2005/gmd/gmd.xsd", std::string(crosswalk::kGmdNamespace)},
  };
  return formats;
}

std::optional<SchemaKind> native_schema(std::string_view prefix) {
  if (prefix == "fgdc") return SchemaKind::FGDC;
  if (prefix == "eml") return SchemaKind::EML;
  if (prefix == "dif") return SchemaKind::DIF;
  if (prefix == "iso19139") return SchemaKind::ISO19115;
  return std::nullopt;
}

std::optional<std::string_view> native_prefix(SchemaKind schema) {
  switch (schema) {
    case SchemaKind::FGDC: return "fgdc";
    case SchemaKind::EML: return "eml";
    case SchemaKind::DIF: return "dif";
    case SchemaKind::ISO19115: return "iso19139";
    default: return std::nullopt;
  }
}

std::vector<std::string> set_specs(const MetadataRecord& record) {
  std::vector<std::string> out;
  if (!record.source_id.empty()) out.push_back(record.source_id);
  for (const auto& s : record.sets) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

OaiResponse handle_request(const Params& params, const StoreView& view, const RepositoryConfig& config,
                           Instant now) {
  return Handler(params, view, config, now).run();
}

std::string serialize_response(const OaiResponse& response) {
  xml::Writer w;
  w.open("OAI-PMH", {{"xmlns", kOaiNamespace},
                     {"xmlns:xsi", "http://www.w3.org/2001/XMLSchema-instance"},
                     {"xsi:schemaLocation",
                      "http://www.openarchives.org/OAI/2.0/ http://www.openarchives.org/OAI/2.0/OAI-PMH.xsd"}});
  w.leaf("responseDate", format_utc(response.response_date));
  std::vector<std::pair<std::string, std::string>> request_attrs;
  if (response.request.verb) request_attrs.emplace_back("verb", std::string(to_string(*response.request.verb)));
  for (const auto& a : response.request.arguments) request_attrs.push_back(a);
  {
    // <request> carries the base URL as text.
    std::string line = "<request";
    for (const auto& [k, v] : request_attrs) line += " " + k + "=\"" + xml::escape_attribute(v) + "\"";
    line += ">" + xml::escape_text(response.base_url) + "</request>";
    w.raw(line);
  }

  auto token_line = [](const std::optional<ResumptionToken>& t) {
    std::string line = "<resumptionToken";
    if (t->expiration) line += " expirationDate=\"" + format_utc(*t->expiration) + "\"";
    line += " completeListSize=\"" + std::to_string(t->complete_list_size) + "\"";
    line += " cursor=\"" + std::to_string(t->cursor) + "\"";
    if (t->value.empty()) return line + "/>";
    return line + ">" + xml::escape_text(t->value) + "</resumptionToken>";
  };

  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::vector<OaiError>>) {
          for (const auto& e : p) w.leaf("error", e.message, {{"code", to_string(e.code)}});
        } else if constexpr (std::is_same_v<T, IdentifyInfo>) {
          w.open("Identify");
          w.leaf("repositoryName", p.repository_name);
          w.leaf("baseURL", p.base_url);
          w.leaf("protocolVersion", p.protocol_version);
          for (const auto& e : p.admin_emails) w.leaf("adminEmail", e);
          w.leaf("earliestDatestamp", format_utc(p.earliest_datestamp));
          w.leaf("deletedRecord", p.deleted_record);
          w.leaf("granularity", p.granularity);
          w.close();
        } else if constexpr (std::is_same_v<T, std::vector<MetadataFormat>>) {
          w.open("ListMetadataFormats");
          for (const auto& f : p) {
            w.open("metadataFormat");
            w.leaf("metadataPrefix", f.prefix);
            w.leaf("schema", f.schema);
            w.leaf("metadataNamespace", f.ns);
            w.close();
          }
          w.close();
        } else if constexpr (std::is_same_v<T, std::vector<SetInfo>>) {
          w.open("ListSets");
          for (const auto& s : p) {
            w.open("set");
            w.leaf("setSpec", s.spec);
            w.leaf("setName", s.name);
            w.close();
          }
          w.close();
        } else if constexpr (std::is_same_v<T, HeaderList>) {
          w.open("ListIdentifiers");
          for (const auto& h : p.headers) write_header(w, h);
          if (p.token) w.raw(token_line(p.token));
          w.close();
        } else if constexpr (std::is_same_v<T, RecordList>) {
          w.open("ListRecords");
          for (const auto& r : p.records) write_record(w, r);
          if (p.token) w.raw(token_line(p.token));
          w.close();
        } else if constexpr (std::is_same_v<T, Record>) {
          w.open("GetRecord");
          write_record(w, p);
          w.close();
        }
      },
      response.payload);
  return w.str();
}

std::string encode_token(const TokenState& s, std::string_view secret) {
  nlohmann::ordered_json j;
  j["v"] = to_string(s.verb);
  j["p"] = s.metadata_prefix;
  if (s.from) j["f"] = *s.from;
  if (s.until) j["u"] = *s.until;
  if (s.set) j["s"] = *s.set;
  j["c"] = s.cursor;
  j["n"] = s.complete_list_size;
  j["k"] = s.last_identifier;
  j["q"] = s.snapshot_seq;
  j["e"] = s.expiry.time_since_epoch().count();
  std::string payload = text::base64url_encode(j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
  return payload + "." + hmac_b64(payload, secret);
}

std::optional<TokenState> decode_token(std::string_view token, std::string_view secret) {
  auto dot = token.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  auto payload = token.substr(0, dot);
  auto mac = token.substr(dot + 1);
  auto expected = hmac_b64(payload, secret);
  if (CRYPTO_memcmp(expected.data(), mac.data(), std::min(expected.size(), mac.size())) != 0 ||
      expected.size() != mac.size()) {
    return std::nullopt;
  }
  try {
    auto j = nlohmann::json::parse(text::base64url_decode(payload));
    TokenState s;
    auto verb = verb_from_string(j.at("v").get<std::string>());
    if (!verb) return std::nullopt;
    s.verb = *verb;
    s.metadata_prefix = j.at("p").get<std::string>();
    if (j.contains("f")) s.from = j["f"].get<std::string>();
    if (j.contains("u")) s.until = j["u"].get<std::string>();
    if (j.contains("s")) s.set = j["s"].get<std::string>();
    s.cursor = j.at("c").get<std::size_t>();
    s.complete_list_size = j.at("n").get<std::size_t>();
    s.last_identifier = j.at("k").get<std::string>();
    s.snapshot_seq = j.at("q").get<std::uint64_t>();
    s.expiry = Instant{std::chrono::seconds(j.at("e").get<std::int64_t>())};
    return s;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace mercury::oai
