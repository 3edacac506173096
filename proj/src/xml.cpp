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

#include "mercury/xml.hpp"

#include <expat.h>

#include <climits>
#include <memory>
#include <optional>
#include <set>

#include "mercury/text.hpp"

namespace mercury::xml {

namespace {

using Bindings = std::vector<std::pair<std::string, std::string>>;

bool allowed_char(char32_t cp) {
  if (cp == 0x9 || cp == 0xA || cp == 0xD) return true;
  if (cp < 0x20) return false;
  if (cp >= 0xD800 && cp <= 0xDFFF) return false;
  if (cp == 0xFFFE || cp == 0xFFFF) return false;
  return cp <= 0x10FFFF;
}

std::string escape(std::string_view s, bool attribute) {
  std::string out;
  out.reserve(s.size() + 8);
  bool plain = true;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (u >= 0x80 || u < 0x20 || c == '&' || c == '<' || c == '>' || c == '"') {
      plain = false;
      break;
    }
  }
  if (plain) return std::string(s);
  for (char32_t cp : text::decode_utf8(s)) {
    if (!allowed_char(cp)) continue;
    switch (cp) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        out += attribute ? "&quot;" : "\"";
        break;
      case '\n':
        out += attribute ? "&#10;" : "\n";
        break;
      case '\r': out += "&#13;"; break;
      case '\t':
        out += attribute ? "&#9;" : "\t";
        break;
      default: text::append_utf8(out, cp);
    }
  }
  return out;
}

void split_qname(std::string_view qname, std::string& prefix, std::string& local) {
  auto colon = qname.find(':');
  if (colon == std::string_view::npos) {
    prefix.clear();
    local.assign(qname);
  } else {
    prefix.assign(qname.substr(0, colon));
    local.assign(qname.substr(colon + 1));
  }
}

bool ns_compatible(const Element& e, std::string_view ns_uri) {
  return ns_uri.empty() || e.ns.empty() || e.ns == ns_uri;
}

struct Builder {
  std::vector<Element> stack;
  std::vector<Bindings> scopes;
  std::optional<Element> root;
  bool too_deep = false;
  XML_Parser parser = nullptr;

  std::string resolve(const std::string& prefix) const {
    if (prefix == "xml") return "http://www.w3.org/XML/1998/namespace";
    for (auto scope = scopes.rbegin(); scope != scopes.rend(); ++scope) {
      for (const auto& [p, uri] : *scope) {
        if (p == prefix) return uri;
      }
    }
    return {};
  }

  static void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** atts) {
    auto* self = static_cast<Builder*>(data);
    if (self->stack.size() >= kMaxDepth) {
      self->too_deep = true;
      XML_StopParser(self->parser, XML_FALSE);
      return;
    }
    Element e;
    e.name = name;
    split_qname(e.name, e.prefix, e.local);
    Bindings scope;
    for (std::size_t i = 0; atts[i] != nullptr; i += 2) {
      std::string_view attr_name = atts[i];
      if (attr_name == "xmlns") {
        scope.emplace_back("", atts[i + 1]);
      } else if (attr_name.starts_with("xmlns:")) {
        scope.emplace_back(std::string(attr_name.substr(6)), atts[i + 1]);
      }
      e.attributes.push_back({atts[i], atts[i + 1]});
    }
    self->scopes.push_back(std::move(scope));
    e.ns = self->resolve(e.prefix);
    self->stack.push_back(std::move(e));
  }

  static void XMLCALL on_end(void* data, const XML_Char*) {
    auto* self = static_cast<Builder*>(data);
    Element done = std::move(self->stack.back());
    self->stack.pop_back();
    self->scopes.pop_back();
    if (self->stack.empty()) {
      self->root = std::move(done);
    } else {
      self->stack.back().children.push_back(std::move(done));
    }
  }

  static void XMLCALL on_chars(void* data, const XML_Char* s, int len) {
    auto* self = static_cast<Builder*>(data);
    if (self->stack.empty()) return;
    Element& top = self->stack.back();
    if (top.children.empty()) {
      top.text.append(s, static_cast<std::size_t>(len));
    } else {
      top.children.back().tail.append(s, static_cast<std::size_t>(len));
    }
  }
};

void collect_usage(const Element& e, std::set<std::string>& used) {
  used.insert(e.prefix);
  for (const auto& a : e.attributes) {
    auto colon = a.name.find(':');
    if (colon == std::string::npos) continue;
    auto prefix = a.name.substr(0, colon);
    if (prefix != "xmlns" && prefix != "xml") used.insert(prefix);
  }
  for (const auto& c : e.children) collect_usage(c, used);
}

void serialize_into(const Element& e, std::string& out) {
  out += '<';
  out += e.name;
  for (const auto& a : e.attributes) {
    out += ' ';
    out += a.name;
    out += "=\"";
    out += escape(a.value, true);
    out += '"';
  }
  if (e.children.empty() && e.text.empty()) {
    out += "/>";
    return;
  }
  out += '>';
  out += escape(e.text, false);
  for (const auto& c : e.children) {
    serialize_into(c, out);
    out += escape(c.tail, false);
  }
  out += "</";
  out += e.name;
  out += '>';
}

template <typename Range>
void append_attrs(std::string& out, const Range& attrs) {
  for (const auto& [k, v] : attrs) {
    out += ' ';
    out += k;
    out += "=\"";
    out += escape(v, true);
    out += '"';
  }
}

void all_text_into(const Element& e, std::string& out) {
  out += e.text;
  for (const auto& c : e.children) {
    all_text_into(c, out);
    out += c.tail;
  }
}

}  // namespace

const Element* Element::child(std::string_view local_name, std::string_view ns_uri) const {
  for (const auto& c : children) {
    if (c.local == local_name && ns_compatible(c, ns_uri)) return &c;
  }
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view local_name,
                                                    std::string_view ns_uri) const {
  std::vector<const Element*> out;
  for (const auto& c : children) {
    if (c.local == local_name && ns_compatible(c, ns_uri)) out.push_back(&c);
  }
  return out;
}

const Element* Element::find(std::string_view path) const {
  auto all = find_all(path);
  return all.empty() ? nullptr : all.front();
}

std::vector<const Element*> Element::find_all(std::string_view path) const {
  std::vector<const Element*> current{this};
  for (const auto& step : text::split(path, '/')) {
    if (step.empty()) continue;
    std::vector<const Element*> next;
    for (const Element* e : current) {
      for (const auto& c : e->children) {
        if (c.local == step) next.push_back(&c);
      }
    }
    current = std::move(next);
    if (current.empty()) break;
  }
  return current;
}

const std::string* Element::attribute(std::string_view attr_name) const {
  for (const auto& a : attributes) {
    if (a.name == attr_name) return &a.value;
  }
  return nullptr;
}

const std::string* Element::attribute_local(std::string_view local_name) const {
  for (const auto& a : attributes) {
    auto colon = a.name.find(':');
    std::string_view local =
        colon == std::string::npos ? std::string_view(a.name) : std::string_view(a.name).substr(colon + 1);
    if (local == local_name && !a.name.starts_with("xmlns")) return &a.value;
  }
  return nullptr;
}

std::string Element::all_text() const {
  std::string out;
  all_text_into(*this, out);
  return out;
}

Element parse(std::string_view bytes) {
  if (bytes.empty()) throw XmlError("empty document");
  if (bytes.size() > static_cast<std::size_t>(INT_MAX)) throw XmlError("document too large");

  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate(nullptr), &XML_ParserFree);
  if (!parser) throw XmlError("cannot allocate XML parser");

  Builder builder;
  builder.parser = parser.get();
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), &Builder::on_start, &Builder::on_end);
  XML_SetCharacterDataHandler(parser.get(), &Builder::on_chars);

  auto status = XML_Parse(parser.get(), bytes.data(), static_cast<int>(bytes.size()), XML_TRUE);
  if (builder.too_deep) throw XmlError("element nesting deeper than " + std::to_string(kMaxDepth));
  if (status != XML_STATUS_OK) {
    throw XmlError(std::string("malformed XML at line ") +
                   std::to_string(XML_GetCurrentLineNumber(parser.get())) + ": " +
                   XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  if (!builder.root) throw XmlError("no root element");
  return std::move(*builder.root);
}

std::string serialize(const Element& element) {
  std::string out;
  serialize_into(element, out);
  return out;
}

void detach_namespaces(Element& element, const Bindings& inherited) {
  std::set<std::string> used;
  collect_usage(element, used);
  std::set<std::string> declared;
  for (const auto& a : element.attributes) {
    if (a.name == "xmlns") declared.insert("");
    if (a.name.starts_with("xmlns:")) declared.insert(a.name.substr(6));
  }
  for (const auto& prefix : used) {
    if (declared.count(prefix) > 0) continue;
    for (auto it = inherited.rbegin(); it != inherited.rend(); ++it) {
      if (it->first != prefix) continue;
      element.attributes.push_back({prefix.empty() ? "xmlns" : "xmlns:" + prefix, it->second});
      break;
    }
  }
}

std::string escape_text(std::string_view s) { return escape(s, false); }
std::string escape_attribute(std::string_view s) { return escape(s, true); }

Writer::Writer(bool declaration) {
  if (declaration) out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
}

void Writer::indent() { out_.append(stack_.size() * 2, ' '); }

Writer& Writer::open(std::string_view name, Attrs attrs) {
  indent();
  out_ += '<';
  out_ += name;
  append_attrs(out_, attrs);
  out_ += ">\n";
  stack_.emplace_back(name);
  return *this;
}

Writer& Writer::open(std::string_view name,
                     const std::vector<std::pair<std::string, std::string>>& attrs) {
  indent();
  out_ += '<';
  out_ += name;
  append_attrs(out_, attrs);
  out_ += ">\n";
  stack_.emplace_back(name);
  return *this;
}

Writer& Writer::close() {
  std::string name = std::move(stack_.back());
  stack_.pop_back();
  indent();
  out_ += "</";
  out_ += name;
  out_ += ">\n";
  return *this;
}

Writer& Writer::leaf(std::string_view name, std::string_view content, Attrs attrs,
                     bool self_close_empty) {
  indent();
  out_ += '<';
  out_ += name;
  append_attrs(out_, attrs);
  if (content.empty() && self_close_empty) {
    out_ += "/>\n";
    return *this;
  }
  out_ += '>';
  out_ += escape_text(content);
  out_ += "</";
  out_ += name;
  out_ += ">\n";
  return *this;
}

Writer& Writer::raw(std::string_view markup) {
  indent();
  out_ += markup;
  out_ += '\n';
  return *this;
}

std::string Writer::str() {
  while (!stack_.empty()) close();
  return std::move(out_);
}

}  // namespace mercury::xml
