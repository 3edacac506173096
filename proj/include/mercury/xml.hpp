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

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mercury::xml {

class XmlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxDepth = 256;

struct Attribute {
  std::string name;  // qualified, as written
  std::string value;
};

/// ElementTree-style node: `text` precedes the first child, each child's
/// `tail` follows it, so mixed content keeps its order.
struct Element {
  std::string name;    // qualified, as written
  std::string prefix;  // empty when unprefixed
  std::string local;
  std::string ns;  // resolved namespace URI; empty when none or unbound
  std::vector<Attribute> attributes;
  std::vector<Element> children;
  std::string text;
  std::string tail;

  /// First child with this local name, matching `ns` only when both the
  /// child and the argument carry a namespace.
  const Element* child(std::string_view local_name, std::string_view ns_uri = {}) const;
  std::vector<const Element*> children_named(std::string_view local_name,
                                             std::string_view ns_uri = {}) const;
  /// Follows a '/'-separated path of local names.
  const Element* find(std::string_view path) const;
  std::vector<const Element*> find_all(std::string_view path) const;

  const std::string* attribute(std::string_view name) const;
  /// Attribute by local name, ignoring any prefix.
  const std::string* attribute_local(std::string_view local_name) const;

  /// Concatenated character data of this element and its descendants.
  std::string all_text() const;
};

/// Parses a complete document. Throws XmlError when the bytes are not
/// well-formed XML, nest deeper than kMaxDepth, or are empty.
Element parse(std::string_view bytes);

/// Serializes a subtree as a standalone fragment. Namespace prefixes used
/// inside but declared on an ancestor are not re-declared; see
/// detach_namespaces().
std::string serialize(const Element& element);

/// Makes an extracted subtree standalone: declares on `element` every
/// namespace binding in `inherited` that the subtree uses and does not
/// declare itself.
void detach_namespaces(Element& element,
                       const std::vector<std::pair<std::string, std::string>>& inherited);

/// Escapes character data; drops characters not allowed in XML 1.0 and
/// replaces invalid UTF-8 with U+FFFD.
std::string escape_text(std::string_view s);
std::string escape_attribute(std::string_view s);

/// Streaming writer producing deterministic, indented UTF-8 output.
class Writer {
 public:
  using Attrs = std::initializer_list<std::pair<std::string_view, std::string_view>>;

  explicit Writer(bool declaration = true);

  Writer& open(std::string_view name, Attrs attrs = {});
  Writer& open(std::string_view name, const std::vector<std::pair<std::string, std::string>>& attrs);
  Writer& close();
  /// <name attrs>text</name>, or <name attrs/> when text is empty and
  /// `self_close_empty` is set.
  Writer& leaf(std::string_view name, std::string_view text, Attrs attrs = {},
               bool self_close_empty = false);
  /// Inserts already-serialized markup as a child line.
  Writer& raw(std::string_view markup);

  std::string str();

 private:
  void indent();

  std::string out_;
  std::vector<std::string> stack_;
};

}  // namespace mercury::xml
