#include "pentestmcp/scan/xml.hpp"

#include <charconv>

namespace pentestmcp::xml {

namespace {

bool is_name_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == ':' ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) { return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.'; }

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Parser {
 public:
  explicit Parser(std::string_view doc) : doc_(doc) {}

  Element document() {
    skip_misc();
    if (starts("<!DOCTYPE")) {
      skip_doctype();
      skip_misc();
    }
    if (pos_ >= doc_.size() || doc_[pos_] != '<') fail("expected root element");
    Element root = element(0);
    skip_misc();
    if (pos_ != doc_.size()) fail("content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }

  bool starts(std::string_view s) const { return doc_.substr(pos_, s.size()) == s; }

  void expect(std::string_view s) {
    if (!starts(s)) fail("expected '" + std::string(s) + "'");
    pos_ += s.size();
  }

  void skip_ws() {
    while (pos_ < doc_.size() && is_ws(doc_[pos_])) ++pos_;
  }

  void skip_until(std::string_view terminator) {
    auto end = doc_.find(terminator, pos_);
    if (end == std::string_view::npos) {
      pos_ = doc_.size();
      fail("unterminated construct, expected '" + std::string(terminator) + "'");
    }
    pos_ = end + terminator.size();
  }

  // Whitespace, comments and processing instructions.
  void skip_misc() {
    while (true) {
      skip_ws();
      if (starts("<?")) {
        skip_until("?>");
      } else if (starts("<!--")) {
        skip_until("-->");
      } else {
        return;
      }
    }
  }

  void skip_doctype() {
    pos_ += 9;
    int depth = 0;
    while (pos_ < doc_.size()) {
      char c = doc_[pos_++];
      if (c == '[') ++depth;
      if (c == ']') --depth;
      if (c == '>' && depth <= 0) return;
    }
    fail("unterminated DOCTYPE");
  }

  std::string name() {
    if (pos_ >= doc_.size() || !is_name_start(doc_[pos_])) fail("expected a name");
    std::size_t start = pos_;
    while (pos_ < doc_.size() && is_name_char(doc_[pos_])) ++pos_;
    return std::string(doc_.substr(start, pos_ - start));
  }

  void entity(std::string& out) {
    std::size_t start = pos_;
    auto semi = doc_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail("unterminated entity reference");
    std::string_view ref = doc_.substr(pos_ + 1, semi - pos_ - 1);
    pos_ = semi + 1;
    if (ref == "lt") out += '<';
    else if (ref == "gt") out += '>';
    else if (ref == "amp") out += '&';
    else if (ref == "quot") out += '"';
    else if (ref == "apos") out += '\'';
    else if (!ref.empty() && ref.front() == '#') {
      unsigned long cp = 0;
      std::string_view digits = ref.substr(1);
      int base = 10;
      if (!digits.empty() && (digits.front() == 'x' || digits.front() == 'X')) {
        digits.remove_prefix(1);
        base = 16;
      }
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, base);
      if (digits.empty() || ec != std::errc() || p != digits.data() + digits.size() || cp > 0x10FFFF) {
        pos_ = start;
        fail("bad character reference");
      }
      append_utf8(out, cp);
    } else {
      pos_ = start;
      fail("unknown entity '&" + std::string(ref) + ";'");
    }
  }

  std::string attribute_value() {
    if (pos_ >= doc_.size() || (doc_[pos_] != '"' && doc_[pos_] != '\'')) fail("expected quoted value");
    char quote = doc_[pos_++];
    std::string value;
    while (true) {
      if (pos_ >= doc_.size()) fail("unterminated attribute value");
      char c = doc_[pos_];
      if (c == quote) {
        ++pos_;
        return value;
      }
      if (c == '<') fail("'<' in attribute value");
      if (c == '&') {
        entity(value);
      } else {
        value += c;
        ++pos_;
      }
    }
  }

  Element element(int depth) {
    if (depth > 256) fail("nesting too deep");
    expect("<");
    Element e;
    e.name = name();
    while (true) {
      std::size_t before = pos_;
      skip_ws();
      if (pos_ >= doc_.size()) fail("unterminated start tag");
      if (starts("/>")) {
        pos_ += 2;
        return e;
      }
      if (doc_[pos_] == '>') {
        ++pos_;
        break;
      }
      if (before == pos_) fail("expected whitespace before attribute");
      std::string key = name();
      skip_ws();
      expect("=");
      skip_ws();
      e.attributes.emplace_back(std::move(key), attribute_value());
    }

    while (true) {
      if (pos_ >= doc_.size()) fail("missing end tag for <" + e.name + ">");
      if (starts("</")) {
        pos_ += 2;
        std::size_t name_at = pos_;
        std::string closing = name();
        if (closing != e.name) {
          pos_ = name_at;
          fail("mismatched end tag </" + closing + "> for <" + e.name + ">");
        }
        skip_ws();
        expect(">");
        return e;
      }
      if (starts("<!--")) {
        skip_until("-->");
      } else if (starts("<![CDATA[")) {
        pos_ += 9;
        auto end = doc_.find("]]>", pos_);
        if (end == std::string_view::npos) {
          pos_ = doc_.size();
          fail("unterminated CDATA section");
        }
        e.text.append(doc_.substr(pos_, end - pos_));
        pos_ = end + 3;
      } else if (starts("<?")) {
        skip_until("?>");
      } else if (doc_[pos_] == '<') {
        e.children.push_back(element(depth + 1));
      } else if (doc_[pos_] == '&') {
        entity(e.text);
      } else {
        e.text += doc_[pos_++];
      }
    }
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
};

}  // namespace

const std::string* Element::attr(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string Element::attr_or(std::string_view key, std::string fallback) const {
  const std::string* v = attr(key);
  return v ? *v : std::move(fallback);
}

const Element* Element::child(std::string_view child_name) const {
  for (const auto& c : children) {
    if (c.name == child_name) return &c;
  }
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view child_name) const {
  std::vector<const Element*> out;
  for (const auto& c : children) {
    if (c.name == child_name) out.push_back(&c);
  }
  return out;
}

Element parse(std::string_view document) { return Parser(document).document(); }

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      case '\n': out += "&#xa;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace pentestmcp::xml
