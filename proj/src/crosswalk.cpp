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

#include "mercury/crosswalk.hpp"

#include <charconv>

#include "mercury/text.hpp"

namespace mercury::crosswalk {

namespace {

using xml::Element;
using Code = CrosswalkError::Code;

[[noreturn]] void fail(Code code, const std::string& message) {
  throw CrosswalkError(code, message);
}

// Character data with a space at every element boundary, whitespace
// collapsed. Keeps "<para>a</para><para>b</para>" from gluing into "ab".
void spaced_text_into(const Element& e, std::string& out) {
  out += e.text;
  for (const auto& c : e.children) {
    out += ' ';
    spaced_text_into(c, out);
    out += ' ';
    out += c.tail;
  }
}

std::string text_of(const Element* e) {
  if (e == nullptr) return {};
  std::string raw;
  spaced_text_into(*e, raw);
  return text::collapse_whitespace(raw);
}

std::string first_text(const Element& root, std::string_view path) {
  for (const Element* e : root.find_all(path)) {
    auto t = text_of(e);
    if (!t.empty()) return t;
  }
  return {};
}

std::vector<std::string> all_texts(const Element& root, std::string_view path) {
  std::vector<std::string> out;
  for (const Element* e : root.find_all(path)) {
    auto t = text_of(e);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  s = text::trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

double coordinate(const Element* e, std::string_view what) {
  auto v = parse_number(text_of(e));
  if (!v) fail(Code::CoordinateOutOfRange, std::string(what) + " is not a number");
  return *v;
}

// Reads a bounding box from four child elements; absent when any of the
// four is missing.
std::optional<GeoBoundingBox> bbox_from(const Element* parent, std::string_view west,
                                        std::string_view east, std::string_view south,
                                        std::string_view north) {
  if (parent == nullptr) return std::nullopt;
  const Element* w = parent->find(west);
  const Element* e = parent->find(east);
  const Element* s = parent->find(south);
  const Element* n = parent->find(north);
  if (!w || !e || !s || !n) return std::nullopt;
  double wv = coordinate(w, west), ev = coordinate(e, east), sv = coordinate(s, south),
         nv = coordinate(n, north);
  try {
    return GeoBoundingBox::from_wsen(wv, sv, ev, nv);
  } catch (const RecordError& err) {
    fail(Code::CoordinateOutOfRange, err.what());
  }
}

bool is_open_date(std::string_view s) {
  return s.empty() || text::iequals(s, "present") || text::iequals(s, "unknown") ||
         text::iequals(s, "now") || text::iequals(s, "unpublished material") || s == "..";
}

std::optional<Instant> date_value(std::string_view s, std::string_view what) {
  s = text::trim(s);
  if (is_open_date(s)) return std::nullopt;
  auto d = parse_date(s);
  if (!d) fail(Code::InvalidDate, std::string(what) + ": cannot parse date '" + std::string(s) + "'");
  return d;
}

std::optional<TemporalExtent> extent_of(std::optional<Instant> start, std::optional<Instant> end) {
  if (!start && !end) return std::nullopt;
  if (start && end && *start > *end) fail(Code::InvalidDate, "temporal start is after end");
  return TemporalExtent{start, end};
}

bool is_url(std::string_view s) {
  return text::starts_with_ci(s, "http://") || text::starts_with_ci(s, "https://") ||
         text::starts_with_ci(s, "ftp://");
}

bool is_dc_element(const Element& e) {
  if (e.ns == kDcNamespace || e.ns == kDcTermsNamespace) return true;
  return e.ns.empty() && (e.prefix == "dc" || e.prefix == "dcterms");
}

bool is_eml_namespace(std::string_view ns) {
  return ns.empty() || ns.starts_with("eml://ecoinformatics.org/eml-") ||
         ns.starts_with("https://eml.ecoinformatics.org/eml-");
}

bool dc_family(SchemaKind k) { return k == SchemaKind::DublinCore || k == SchemaKind::OaiDc; }

// Fields every mapping fills in; the record is assembled afterwards.
struct Extracted {
  std::string native_id;
  std::optional<Instant> native_date;
  std::string title;
  std::string abstract;
  std::vector<std::string> keywords;
  std::vector<std::string> authors;
  std::vector<std::string> data_urls;
  std::optional<GeoBoundingBox> bbox;
  std::optional<TemporalExtent> temporal;
};

std::optional<Instant> lenient_date(std::string_view s) {
  // Metadata dates only feed the datestamp fallback; garbage is ignored.
  return parse_date(text::trim(s));
}

Extracted map_fgdc(const Element& root) {
  Extracted x;
  x.title = first_text(root, "idinfo/citation/citeinfo/title");
  x.abstract = first_text(root, "idinfo/descript/abstract");
  x.keywords = all_texts(root, "idinfo/keywords/theme/themekey");
  x.authors = all_texts(root, "idinfo/citation/citeinfo/origin");
  x.data_urls = all_texts(root, "idinfo/citation/citeinfo/onlink");
  x.bbox = bbox_from(root.find("idinfo/spdom/bounding"), "westbc", "eastbc", "southbc", "northbc");

  if (const Element* info = root.find("idinfo/timeperd/timeinfo")) {
    if (const Element* range = info->child("rngdates")) {
      x.temporal = extent_of(date_value(text_of(range->child("begdate")), "begdate"),
                             date_value(text_of(range->child("enddate")), "enddate"));
    } else if (const Element* single = info->find("sngdate/caldate")) {
      auto d = date_value(text_of(single), "caldate");
      x.temporal = extent_of(d, d);
    } else if (const Element* multi = info->child("mdattim")) {
      std::optional<Instant> lo, hi;
      for (const Element* c : multi->find_all("sngdate/caldate")) {
        auto d = date_value(text_of(c), "caldate");
        if (!d) continue;
        if (!lo || *d < *lo) lo = d;
        if (!hi || *d > *hi) hi = d;
      }
      x.temporal = extent_of(lo, hi);
    }
  }
  x.native_date = lenient_date(first_text(root, "metainfo/metd"));
  return x;
}

std::string eml_person(const Element& party) {
  if (const Element* name = party.child("individualName")) {
    std::string surname = text_of(name->child("surName"));
    std::vector<std::string> given = all_texts(*name, "givenName");
    std::string joined;
    for (const auto& g : given) joined += (joined.empty() ? "" : " ") + g;
    if (!surname.empty() && !joined.empty()) return surname + ", " + joined;
    if (!surname.empty()) return surname;
    if (!joined.empty()) return joined;
  }
  return text_of(party.child("organizationName"));
}

Extracted map_eml(const Element& root) {
  Extracted x;
  if (const std::string* id = root.attribute("packageId")) x.native_id = text::collapse_whitespace(*id);
  const Element* ds = root.child("dataset");
  if (ds == nullptr) return x;
  x.title = first_text(*ds, "title");
  x.abstract = first_text(*ds, "abstract");
  x.keywords = all_texts(*ds, "keywordSet/keyword");
  for (const Element* creator : ds->children_named("creator")) {
    auto name = eml_person(*creator);
    if (!name.empty()) x.authors.push_back(std::move(name));
  }
  x.data_urls = all_texts(*ds, "distribution/online/url");
  x.bbox = bbox_from(ds->find("coverage/geographicCoverage/boundingCoordinates"),
                     "westBoundingCoordinate", "eastBoundingCoordinate",
                     "southBoundingCoordinate", "northBoundingCoordinate");
  if (const Element* tc = ds->find("coverage/temporalCoverage")) {
    if (const Element* range = tc->child("rangeOfDates")) {
      x.temporal = extent_of(date_value(first_text(*range, "beginDate/calendarDate"), "beginDate"),
                             date_value(first_text(*range, "endDate/calendarDate"), "endDate"));
    } else if (const Element* single = tc->child("singleDateTime")) {
      auto d = date_value(first_text(*single, "calendarDate"), "singleDateTime");
      x.temporal = extent_of(d, d);
    }
  }
  x.native_date = lenient_date(first_text(*ds, "pubDate"));
  return x;
}

std::string dif_parameters(const Element& p) {
  static constexpr std::string_view kLevels[] = {"Category",         "Topic",
                                                 "Term",             "Variable_Level_1",
                                                 "Variable_Level_2", "Variable_Level_3",
                                                 "Detailed_Variable"};
  std::string joined;
  for (auto level : kLevels) {
    auto v = text_of(p.child(level));
    if (v.empty()) continue;
    if (!joined.empty()) joined += " > ";
    joined += v;
  }
  return joined;
}

Extracted map_dif(const Element& root) {
  Extracted x;
  x.native_id = first_text(root, "Entry_ID");
  x.title = first_text(root, "Entry_Title");
  x.abstract = first_text(root, "Summary");
  for (const auto& c : root.children) {
    if (c.local == "Parameters") {
      auto v = dif_parameters(c);
      if (!v.empty()) x.keywords.push_back(std::move(v));
    } else if (c.local == "Keyword") {
      auto v = text_of(&c);
      if (!v.empty()) x.keywords.push_back(std::move(v));
    }
  }
  x.authors = all_texts(root, "Data_Set_Citation/Dataset_Creator");
  x.data_urls = all_texts(root, "Related_URL/URL");
  x.bbox = bbox_from(root.child("Spatial_Coverage"), "Westernmost_Longitude",
                     "Easternmost_Longitude", "Southernmost_Latitude", "Northernmost_Latitude");
  if (const Element* tc = root.child("Temporal_Coverage")) {
    x.temporal = extent_of(date_value(text_of(tc->child("Start_Date")), "Start_Date"),
                           date_value(text_of(tc->child("Stop_Date")), "Stop_Date"));
  }
  x.native_date = lenient_date(first_text(root, "Last_DIF_Revision_Date"));
  return x;
}

Extracted map_dublin_core(const Element& root) {
  Extracted x;
  for (const auto& c : root.children) {
    if (!is_dc_element(c)) continue;
    auto v = text_of(&c);
    if (v.empty()) continue;
    if (c.local == "title") {
      if (x.title.empty()) x.title = v;
    } else if (c.local == "description") {
      if (x.abstract.empty()) x.abstract = v;
    } else if (c.local == "subject") {
      x.keywords.push_back(v);
    } else if (c.local == "creator") {
      x.authors.push_back(v);
    } else if (c.local == "identifier") {
      if (is_url(v)) {
        x.data_urls.push_back(v);
      } else if (x.native_id.empty()) {
        x.native_id = v;
      }
    } else if (c.local == "coverage") {
      if (!x.bbox) {
        if (auto box = decode_box_coverage(v)) {
          x.bbox = box;
          continue;
        }
      }
      if (!x.temporal) {
        if (auto t = decode_time_coverage(v)) x.temporal = t;
      }
    }
  }
  return x;
}

std::string iso_party(const Element& party) {
  auto name = first_text(party, "individualName");
  if (name.empty()) name = first_text(party, "organisationName");
  return name;
}

Extracted map_iso(const Element& root) {
  Extracted x;
  x.native_id = first_text(root, "fileIdentifier");
  x.native_date = lenient_date(first_text(root, "dateStamp"));
  const Element* ident = root.find("identificationInfo/MD_DataIdentification");
  if (ident == nullptr) return x;
  x.title = first_text(*ident, "citation/CI_Citation/title");
  x.abstract = first_text(*ident, "abstract");
  x.keywords = all_texts(*ident, "descriptiveKeywords/MD_Keywords/keyword");
  for (const Element* party :
       ident->find_all("citation/CI_Citation/citedResponsibleParty/CI_ResponsibleParty")) {
    auto name = iso_party(*party);
    if (!name.empty()) x.authors.push_back(std::move(name));
  }
  x.data_urls = all_texts(
      root, "distributionInfo/MD_Distribution/transferOptions/MD_DigitalTransferOptions/onLine/"
            "CI_OnlineResource/linkage/URL");

  for (const Element* extent : ident->find_all("extent/EX_Extent")) {
    if (!x.bbox) {
      x.bbox = bbox_from(extent->find("geographicElement/EX_GeographicBoundingBox"),
                         "westBoundLongitude", "eastBoundLongitude", "southBoundLatitude",
                         "northBoundLatitude");
    }
    if (!x.temporal) {
      const Element* te = extent->find("temporalElement/EX_TemporalExtent/extent");
      if (te == nullptr) continue;
      if (const Element* period = te->child("TimePeriod")) {
        x.temporal = extent_of(date_value(text_of(period->child("beginPosition")), "beginPosition"),
                               date_value(text_of(period->child("endPosition")), "endPosition"));
      } else if (const Element* instant = te->child("TimeInstant")) {
        auto d = date_value(text_of(instant->child("timePosition")), "timePosition");
        x.temporal = extent_of(d, d);
      }
    }
  }
  return x;
}

}  // namespace

std::string_view to_string(CrosswalkError::Code code) noexcept {
  switch (code) {
    case Code::MalformedXml: return "MalformedXml";
    case Code::UnknownSchema: return "UnknownSchema";
    case Code::MissingRequiredField: return "MissingRequiredField";
    case Code::CoordinateOutOfRange: return "CoordinateOutOfRange";
    case Code::InvalidDate: return "InvalidDate";
    case Code::DeletedRecord: return "DeletedRecord";
  }
  return "Unknown";
}

SchemaKind detect_schema(const Element& root) {
  const auto& local = root.local;
  const auto& ns = root.ns;
  if (local == "MD_Metadata" && (ns.empty() || ns == kGmdNamespace)) return SchemaKind::ISO19115;
  if (local == "eml" && is_eml_namespace(ns)) return SchemaKind::EML;
  if (local == "DIF" && (ns.empty() || ns == kDifNamespace)) return SchemaKind::DIF;
  if (local == "metadata" && ns.empty() && root.child("idinfo") != nullptr) return SchemaKind::FGDC;
  if (local == "dc" && (ns == kOaiDcNamespace || (ns.empty() && root.prefix == "oai_dc"))) {
    return SchemaKind::OaiDc;
  }
  if (local == "dc" && (ns.empty() || ns == kDcNamespace)) return SchemaKind::DublinCore;
  for (const auto& c : root.children) {
    if (c.local == "title" && is_dc_element(c)) return SchemaKind::DublinCore;
  }
  fail(Code::UnknownSchema, "no metadata standard matches root element <" + root.name + ">");
}

SchemaKind detect_schema(std::string_view document) {
  try {
    return detect_schema(xml::parse(document));
  } catch (const xml::XmlError& e) {
    fail(Code::MalformedXml, e.what());
  }
}

MetadataRecord parse(SchemaKind schema, std::string_view document, std::string_view source_id,
                     const ParseContext& context) {
  Element root;
  try {
    root = xml::parse(document);
  } catch (const xml::XmlError& e) {
    fail(Code::MalformedXml, e.what());
  }
  return parse(schema, root, document, source_id, context);
}

MetadataRecord parse(SchemaKind schema, const Element& root, std::string_view document,
                     std::string_view source_id, const ParseContext& context) {
  SchemaKind detected = detect_schema(root);
  if (detected != schema && !(dc_family(detected) && dc_family(schema))) {
    fail(Code::UnknownSchema, "document is " + std::string(to_string(detected)) + ", not " +
                                  std::string(to_string(schema)));
  }

  Extracted x;
  switch (schema) {
    case SchemaKind::FGDC: x = map_fgdc(root); break;
    case SchemaKind::EML: x = map_eml(root); break;
    case SchemaKind::DIF: x = map_dif(root); break;
    case SchemaKind::ISO19115: x = map_iso(root); break;
    case SchemaKind::DublinCore:
    case SchemaKind::OaiDc: x = map_dublin_core(root); break;
  }

  std::string local_id = context.local_id.value_or(x.native_id);
  if (local_id.empty() && context.fallback_id) local_id = *context.fallback_id;
  if (local_id.empty()) fail(Code::MissingRequiredField, "document has no identifier");
  if (x.title.empty()) fail(Code::MissingRequiredField, "document has no title");

  MetadataRecord r;
  r.identifier = qualify_identifier(source_id, local_id);
  r.source_id = std::string(source_id);
  r.schema = schema;
  r.title = std::move(x.title);
  r.abstract = std::move(x.abstract);
  r.keywords = std::move(x.keywords);
  r.authors = std::move(x.authors);
  r.data_urls = std::move(x.data_urls);
  r.bbox = x.bbox;
  r.temporal = x.temporal;
  r.datestamp = context.datestamp.value_or(x.native_date.value_or(Instant{}));
  r.sets = context.sets;
  r.raw_document = std::string(document);
  return canonicalize(std::move(r));
}

MetadataRecord parse_any(std::string_view document, std::string_view source_id,
                         const ParseContext& context) {
  Element root;
  try {
    root = xml::parse(document);
  } catch (const xml::XmlError& e) {
    fail(Code::MalformedXml, e.what());
  }
  return parse(detect_schema(root), root, document, source_id, context);
}

std::string encode_box_coverage(const GeoBoundingBox& b) {
  return "box: " + text::format_double(b.west) + "," + text::format_double(b.south) + "," +
         text::format_double(b.east) + "," + text::format_double(b.north);
}

namespace {

std::string coverage_date(const std::optional<Instant>& t) {
  if (!t) return "..";
  return start_of_day(*t) == *t ? format_day(*t) : format_utc(*t);
}

}  // namespace

std::string encode_time_coverage(const TemporalExtent& e) {
  return "time: " + coverage_date(e.start) + "/" + coverage_date(e.end);
}

std::optional<GeoBoundingBox> decode_box_coverage(std::string_view s) {
  s = text::trim(s);
  if (!s.starts_with("box:")) return std::nullopt;
  auto parts = text::split(s.substr(4), ',');
  if (parts.size() != 4) return std::nullopt;
  double v[4];
  for (int i = 0; i < 4; ++i) {
    auto n = parse_number(parts[i]);
    if (!n) return std::nullopt;
    v[i] = *n;
  }
  try {
    return GeoBoundingBox::from_wsen(v[0], v[1], v[2], v[3]);
  } catch (const RecordError& e) {
    fail(Code::CoordinateOutOfRange, e.what());
  }
}

std::optional<TemporalExtent> decode_time_coverage(std::string_view s) {
  s = text::trim(s);
  if (!s.starts_with("time:")) return std::nullopt;
  auto parts = text::split(s.substr(5), '/');
  if (parts.size() != 2) return std::nullopt;
  std::optional<Instant> bounds[2];
  for (int i = 0; i < 2; ++i) {
    auto p = text::trim(parts[i]);
    if (p == ".." || p.empty()) continue;
    bounds[i] = parse_date(p);
    if (!bounds[i]) return std::nullopt;
  }
  return extent_of(bounds[0], bounds[1]);
}

std::string to_oai_dc(const MetadataRecord& r) {
  if (r.deleted) fail(Code::DeletedRecord, "record '" + r.identifier + "' is deleted");
  xml::Writer w(false);
  w.open("oai_dc:dc",
         {{"xmlns:oai_dc", kOaiDcNamespace},
          {"xmlns:dc", kDcNamespace},
          {"xmlns:xsi", "http://www.w3.org/2001/XMLSchema-instance"},
          {"xsi:schemaLocation",
           "http://www.openarchives.org/OAI/2.0/oai_dc/ "
           "http://www.openarchives.org/OAI/2.0/oai_dc.xsd"}});
  w.leaf("dc:title", r.title);
  for (const auto& a : r.authors) w.leaf("dc:creator", a);
  for (const auto& k : r.keywords) w.leaf("dc:subject", k);
  if (!r.abstract.empty()) w.leaf("dc:description", r.abstract);
  for (const auto& u : r.data_urls) w.leaf("dc:identifier", u);
  if (r.bbox) w.leaf("dc:coverage", encode_box_coverage(*r.bbox));
  if (r.temporal) w.leaf("dc:coverage", encode_time_coverage(*r.temporal));
  auto out = w.str();
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

std::optional<std::string> native_markup(const MetadataRecord& record) {
  if (record.raw_document.empty()) return std::nullopt;
  try {
    return xml::serialize(xml::parse(record.raw_document));
  } catch (const xml::XmlError&) {
    return std::nullopt;
  }
}

}  // namespace mercury::crosswalk
