// MessagePack value model and codec used on the Metasploit RPC wire.
#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace pentestmcp::msgpack {

class Value;

using Array = std::vector<Value>;
/// Maps keep wire order; keys may be any value.
using Map = std::vector<std::pair<Value, Value>>;

struct Binary {
  std::string bytes;
  friend bool operator==(const Binary&, const Binary&) = default;
};

class Value {
 public:
  using Storage = std::variant<std::monostate, bool, std::int64_t, std::uint64_t, double, std::string, Binary,
                               Array, Map>;

  Value() = default;
  Value(std::nullptr_t) {}
  Value(bool b) : data_(b) {}
  Value(int i) : data_(static_cast<std::int64_t>(i)) {}
  Value(long i) : data_(static_cast<std::int64_t>(i)) {}
  Value(long long i) : data_(static_cast<std::int64_t>(i)) {}
  Value(unsigned u) : data_(static_cast<std::int64_t>(u)) {}
  Value(unsigned long u) { set_unsigned(u); }
  Value(unsigned long long u) { set_unsigned(u); }
  Value(double d) : data_(d) {}
  Value(const char* s) : data_(std::string(s)) {}
  Value(std::string s) : data_(std::move(s)) {}
  Value(std::string_view s) : data_(std::string(s)) {}
  Value(Binary b) : data_(std::move(b)) {}
  Value(Array a) : data_(std::move(a)) {}
  Value(Map m) : data_(std::move(m)) {}

  bool is_nil() const { return std::holds_alternative<std::monostate>(data_); }
  bool is_bool() const { return std::holds_alternative<bool>(data_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(data_) || std::holds_alternative<std::uint64_t>(data_); }
  bool is_float() const { return std::holds_alternative<double>(data_); }
  /// True for str and bin; Metasploit sends either for text.
  bool is_string() const { return std::holds_alternative<std::string>(data_) || std::holds_alternative<Binary>(data_); }
  bool is_binary() const { return std::holds_alternative<Binary>(data_); }
  bool is_array() const { return std::holds_alternative<Array>(data_); }
  bool is_map() const { return std::holds_alternative<Map>(data_); }

  bool as_bool() const;
  std::int64_t as_int() const;
  double as_double() const;
  const std::string& as_string() const;
  const Array& as_array() const;
  const Map& as_map() const;
  Array& as_array();
  Map& as_map();

  /// Map lookup by string key; nullptr when absent or not a map.
  const Value* find(std::string_view key) const;
  /// String value under `key`, or `fallback`.
  std::string get_string(std::string_view key, std::string fallback = {}) const;

  const Storage& storage() const { return data_; }

  friend bool operator==(const Value&, const Value&) = default;

 private:
  void set_unsigned(unsigned long long u);

  Storage data_;
};

/// Convenience for building maps with string keys.
Value make_map(std::initializer_list<std::pair<std::string_view, Value>> entries);

class DecodeError : public std::runtime_error {
 public:
  DecodeError(std::size_t offset, const std::string& what)
      : std::runtime_error("msgpack decode error at byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

std::string encode(const Value& value);

/// Decodes exactly one value spanning all of `bytes`.
Value decode(std::string_view bytes);

/// Bridges to JSON for rendering. Map keys are stringified; bin becomes a
/// string.
nlohmann::json to_json(const Value& value);
Value from_json(const nlohmann::json& value);

}  // namespace pentestmcp::msgpack
