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

#include "mercury/oai_client.hpp"

#include "mercury/text.hpp"
#include "mercury/time.hpp"
#include "mercury/xml.hpp"

namespace mercury::oai {

namespace {

using Bindings = std::vector<std::pair<std::string, std::string>>;

void push_bindings(const xml::Element& e, Bindings& out) {
  for (const auto& a : e.attributes) {
    if (a.name.starts_with("xmlns:")) out.emplace_back(a.name.substr(6), a.value);
  }
}

const xml::Element& require_child(const xml::Element& e, std::string_view name) {
  const auto* c = e.child(name);
  if (c == nullptr) throw MalformedResponse("<" + e.local + "> has no <" + std::string(name) + ">");
  return *c;
}

Instant parse_stamp(const std::string& text) {
  auto d = parse_oai_datestamp(text::trim(text));
  if (!d) throw MalformedResponse("bad datestamp '" + text + "'");
  return d->instant;
}

Header parse_header(const xml::Element& e) {
  Header h;
  h.identifier = std::string(text::trim(require_child(e, "identifier").text));
  h.datestamp = parse_stamp(require_child(e, "datestamp").text);
  const auto* status = e.attribute("status");
  h.deleted = status != nullptr && *status == "deleted";
  for (const auto* s : e.children_named("setSpec")) h.set_specs.emplace_back(text::trim(s->text));
  return h;
}

Record parse_record(const xml::Element& e, Bindings scope) {
  Record r;
  r.header = parse_header(require_child(e, "header"));
  if (r.header.deleted) return r;
  push_bindings(e, scope);
  const auto* md = e.child("metadata");
  if (md == nullptr) throw MalformedResponse("record '" + r.header.identifier + "' has no metadata");
  push_bindings(*md, scope);
  if (md->children.empty()) throw MalformedResponse("empty metadata in '" + r.header.identifier + "'");
  xml::Element payload = md->children.front();
  xml::detach_namespaces(payload, scope);
  r.metadata = xml::serialize(payload);
  return r;
}

std::optional<ResumptionToken> parse_token(const xml::Element& list) {
  const auto* t = list.child("resumptionToken");
  if (t == nullptr) return std::nullopt;
  ResumptionToken token;
  token.value = std::string(text::trim(t->text));
  if (const auto* n = t->attribute("completeListSize")) token.complete_list_size = std::stoull(*n);
  if (const auto* c = t->attribute("cursor")) token.cursor = std::stoull(*c);
  if (const auto* x = t->attribute("expirationDate")) token.expiration = parse_stamp(*x);
  return token;
}

}  // namespace

OaiResponse parse_response(std::string_view body) {
  xml::Element root;
  try {
    root = xml::parse(body);
  } catch (const xml::XmlError& e) {
    throw MalformedResponse(e.what());
  }
  if (root.local != "OAI-PMH") throw MalformedResponse("root element is <" + root.name + ">, not <OAI-PMH>");

  // The OAI default namespace is not carried into extracted metadata.
  Bindings scope;
  push_bindings(root, scope);

  OaiResponse out;
  try {
    out.response_date = parse_stamp(require_child(root, "responseDate").text);
    const auto& request = require_child(root, "request");
    out.base_url = std::string(text::trim(request.text));
    for (const auto& a : request.attributes) {
      if (a.name == "verb") {
        out.request.verb = verb_from_string(a.value);
      } else if (!a.name.starts_with("xmlns")) {
        out.request.arguments.emplace_back(a.name, a.value);
      }
    }

    auto errors = root.children_named("error");
    if (!errors.empty()) {
      std::vector<OaiError> list;
      for (const auto* e : errors) {
        const auto* code = e->attribute("code");
        auto parsed = code ? error_code_from_string(*code) : std::nullopt;
        if (!parsed) throw MalformedResponse("unknown error code");
        list.push_back({*parsed, std::string(text::trim(e->text))});
      }
      out.payload = std::move(list);
      return out;
    }

    if (const auto* e = root.child("Identify")) {
      IdentifyInfo info;
      info.repository_name = require_child(*e, "repositoryName").text;
      info.base_url = std::string(text::trim(require_child(*e, "baseURL").text));
      info.protocol_version = std::string(text::trim(require_child(*e, "protocolVersion").text));
      for (const auto* a : e->children_named("adminEmail")) info.admin_emails.emplace_back(text::trim(a->text));
      info.earliest_datestamp = parse_stamp(require_child(*e, "earliestDatestamp").text);
      info.deleted_record = std::string(text::trim(require_child(*e, "deletedRecord").text));
      info.granularity = std::string(text::trim(require_child(*e, "granularity").text));
      out.payload = std::move(info);
    } else if (const auto* e = root.child("ListRecords")) {
      RecordList list;
      Bindings inner = scope;
      push_bindings(*e, inner);
      for (const auto* r : e->children_named("record")) list.records.push_back(parse_record(*r, inner));
      list.token = parse_token(*e);
      out.payload = std::move(list);
    } else if (const auto* e = root.child("ListIdentifiers")) {
      HeaderList list;
      for (const auto* h : e->children_named("header")) list.headers.push_back(parse_header(*h));
      list.token = parse_token(*e);
      out.payload = std::move(list);
    } else if (const auto* e = root.child("GetRecord")) {
      Bindings inner = scope;
      push_bindings(*e, inner);
      out.payload = parse_record(require_child(*e, "record"), inner);
    } else if (const auto* e = root.child("ListMetadataFormats")) {
      std::vector<MetadataFormat> formats;
      for (const auto* f : e->children_named("metadataFormat")) {
        formats.push_back({std::string(text::trim(require_child(*f, "metadataPrefix").text)),
                           std::string(text::trim(require_child(*f, "schema").text)),
                           std::string(text::trim(require_child(*f, "metadataNamespace").text))});
      }
      out.payload = std::move(formats);
    } else if (const auto* e = root.child("ListSets")) {
      std::vector<SetInfo> sets;
      for (const auto* s : e->children_named("set")) {
        sets.push_back({std::string(text::trim(require_child(*s, "setSpec").text)),
                        require_child(*s, "setName").text});
      }
      out.payload = std::move(sets);
    } else {
      throw MalformedResponse("response has no verb payload");
    }
  } catch (const std::invalid_argument& e) {
    throw MalformedResponse(std::string("bad number: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw MalformedResponse(std::string("bad number: ") + e.what());
  }
  return out;
}

OaiResponse Client::call(const std::string& base_url, const Params& params) {
  auto url = net::with_query(base_url, params);
  auto response = net::fetch_with_retry(http_, url, retry_);
  if (response.status != 200) {
    throw MalformedResponse("GET " + url + " returned HTTP " + std::to_string(response.status));
  }
  return parse_response(response.body);
}

IdentifyInfo Client::identify(const std::string& base_url) {
  auto r = call(base_url, {{"verb", "Identify"}});
  if (r.is_error()) throw ProtocolError(r.errors().front().code, r.errors().front().message);
  if (!std::holds_alternative<IdentifyInfo>(r.payload)) throw MalformedResponse("Identify answered with another verb");
  return std::get<IdentifyInfo>(r.payload);
}

std::size_t Client::list_records(const ListRequest& request, const std::function<void(HarvestedRecord&&)>& sink) {
  Params params = {{"verb", "ListRecords"}, {"metadataPrefix", request.metadata_prefix}};
  if (request.from || request.until) {
    bool by_day = identify(request.base_url).granularity == "YYYY-MM-DD";
    auto stamp = [&](Instant t) { return by_day ? format_utc(t).substr(0, 10) : format_utc(t); };
    if (request.from) params.emplace_back("from", stamp(*request.from));
    if (request.until) params.emplace_back("until", stamp(*request.until));
  }
  if (request.set) params.emplace_back("set", *request.set);

  std::size_t delivered = 0;
  while (true) {
    auto r = call(request.base_url, params);
    if (r.is_error()) {
      const auto& e = r.errors().front();
      if (e.code == ErrorCode::noRecordsMatch) return delivered;
      throw ProtocolError(e.code, e.message);
    }
    auto* list = std::get_if<RecordList>(&r.payload);
    if (list == nullptr) throw MalformedResponse("ListRecords answered with another verb");
    for (auto& rec : list->records) {
      sink(HarvestedRecord{std::move(rec.header), std::move(rec.metadata)});
      ++delivered;
    }
    if (!list->token || list->token->value.empty()) return delivered;
    params = {{"verb", "ListRecords"}, {"resumptionToken", list->token->value}};
  }
}

}  // namespace mercury::oai
