// Small non-validating XML reader/writer, enough for nmap's -oX output.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pentestmcp::xml {

struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;  // concatenated character data directly inside this element

  const std::string* attr(std::string_view key) const;
  std::string attr_or(std::string_view key, std::string fallback = {}) const;
  const Element* child(std::string_view child_name) const;
  std::vector<const Element*> children_named(std::string_view child_name) const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : std::runtime_error("XML parse error at byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Parses a document and returns its root element. Throws ParseError
/// carrying the byte offset of the first problem.
Element parse(std::string_view document);

/// Escapes &, <, >, " and ' for use in attribute values or text.
std::string escape(std::string_view text);

}  // namespace pentestmcp::xml
