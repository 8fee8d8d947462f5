#include "pentestmcp/msf/msgpack.hpp"

#include <bit>
#include <cstring>
#include <limits>

namespace pentestmcp::msgpack {

namespace {

constexpr int kMaxDepth = 512;

[[noreturn]] void type_error(const char* wanted) { throw std::runtime_error(std::string("msgpack value is not ") + wanted); }

void put_be(std::string& out, std::uint64_t v, int bytes) {
  for (int i = bytes - 1; i >= 0; --i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

void put_length(std::string& out, std::size_t n, std::uint8_t fix_base, std::size_t fix_max, std::uint8_t c8,
                std::uint8_t c16, std::uint8_t c32) {
  if (fix_base && n <= fix_max) {
    out += static_cast<char>(fix_base | n);
  } else if (c8 && n <= 0xFF) {
    out += static_cast<char>(c8);
    put_be(out, n, 1);
  } else if (n <= 0xFFFF) {
    out += static_cast<char>(c16);
    put_be(out, n, 2);
  } else {
    out += static_cast<char>(c32);
    put_be(out, n, 4);
  }
}

void encode_into(std::string& out, const Value& value) {
  const auto& v = value.storage();
  if (std::holds_alternative<std::monostate>(v)) {
    out += '\xc0';
  } else if (auto* b = std::get_if<bool>(&v)) {
    out += *b ? '\xc3' : '\xc2';
  } else if (auto* i = std::get_if<std::int64_t>(&v)) {
    std::int64_t n = *i;
    if (n >= 0) {
      auto u = static_cast<std::uint64_t>(n);
      if (u <= 0x7F) out += static_cast<char>(u);
      else if (u <= 0xFF) { out += '\xcc'; put_be(out, u, 1); }
      else if (u <= 0xFFFF) { out += '\xcd'; put_be(out, u, 2); }
      else if (u <= 0xFFFFFFFFull) { out += '\xce'; put_be(out, u, 4); }
      else { out += '\xcf'; put_be(out, u, 8); }
    } else if (n >= -32) {
      out += static_cast<char>(static_cast<std::uint8_t>(n));
    } else if (n >= std::numeric_limits<std::int8_t>::min()) {
      out += '\xd0'; put_be(out, static_cast<std::uint8_t>(n), 1);
    } else if (n >= std::numeric_limits<std::int16_t>::min()) {
      out += '\xd1'; put_be(out, static_cast<std::uint16_t>(n), 2);
    } else if (n >= std::numeric_limits<std::int32_t>::min()) {
      out += '\xd2'; put_be(out, static_cast<std::uint32_t>(n), 4);
    } else {
      out += '\xd3'; put_be(out, static_cast<std::uint64_t>(n), 8);
    }
  } else if (auto* u = std::get_if<std::uint64_t>(&v)) {
    out += '\xcf';
    put_be(out, *u, 8);
  } else if (auto* d = std::get_if<double>(&v)) {
    out += '\xcb';
    put_be(out, std::bit_cast<std::uint64_t>(*d), 8);
  } else if (auto* s = std::get_if<std::string>(&v)) {
    put_length(out, s->size(), 0xA0, 31, 0xD9, 0xDA, 0xDB);
    out += *s;
  } else if (auto* bin = std::get_if<Binary>(&v)) {
    put_length(out, bin->bytes.size(), 0, 0, 0xC4, 0xC5, 0xC6);
    out += bin->bytes;
  } else if (auto* a = std::get_if<Array>(&v)) {
    put_length(out, a->size(), 0x90, 15, 0, 0xDC, 0xDD);
    for (const auto& e : *a) encode_into(out, e);
  } else if (auto* m = std::get_if<Map>(&v)) {
    put_length(out, m->size(), 0x80, 15, 0, 0xDE, 0xDF);
    for (const auto& [k, e] : *m) {
      encode_into(out, k);
      encode_into(out, e);
    }
  }
}

class Decoder {
 public:
  explicit Decoder(std::string_view bytes) : bytes_(bytes) {}

  Value document() {
    if (bytes_.empty()) throw DecodeError(0, "empty input");
    Value v = value(0);
    if (pos_ != bytes_.size()) throw DecodeError(pos_, "trailing bytes after value");
    return v;
  }

 private:
  std::uint64_t be(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 8) | static_cast<std::uint8_t>(bytes_[pos_++]);
    return v;
  }

  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw DecodeError(pos_, "truncated input");
  }

  std::string raw(std::size_t n) {
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }

  Value array(std::size_t n, int depth) {
    // Each element needs at least one byte; reject absurd counts early.
    need(n);
    Array a;
    a.reserve(n);
    for (std::size_t i = 0; i < n; ++i) a.push_back(value(depth + 1));
    return a;
  }

  Value map(std::size_t n, int depth) {
    need(n * 2);
    Map m;
    m.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Value k = value(depth + 1);
      Value v = value(depth + 1);
      m.emplace_back(std::move(k), std::move(v));
    }
    return m;
  }

  Value value(int depth) {
    if (depth > kMaxDepth) throw DecodeError(pos_, "nesting too deep");
    need(1);
    std::size_t at = pos_;
    auto tag = static_cast<std::uint8_t>(bytes_[pos_++]);
    if (tag <= 0x7F) return Value(static_cast<std::int64_t>(tag));
    if (tag >= 0xE0) return Value(static_cast<std::int64_t>(static_cast<std::int8_t>(tag)));
    if ((tag & 0xF0) == 0x80) return map(tag & 0x0F, depth);
    if ((tag & 0xF0) == 0x90) return array(tag & 0x0F, depth);
    if ((tag & 0xE0) == 0xA0) return Value(raw(tag & 0x1F));
    switch (tag) {
      case 0xC0: return Value();
      case 0xC2: return Value(false);
      case 0xC3: return Value(true);
      case 0xC4: return Value(Binary{raw(be(1))});
      case 0xC5: return Value(Binary{raw(be(2))});
      case 0xC6: return Value(Binary{raw(be(4))});
      case 0xCA: {
        auto bits = static_cast<std::uint32_t>(be(4));
        return Value(static_cast<double>(std::bit_cast<float>(bits)));
      }
      case 0xCB: return Value(std::bit_cast<double>(be(8)));
      case 0xCC: return Value(static_cast<unsigned long long>(be(1)));
      case 0xCD: return Value(static_cast<unsigned long long>(be(2)));
      case 0xCE: return Value(static_cast<unsigned long long>(be(4)));
      case 0xCF: return Value(static_cast<unsigned long long>(be(8)));
      case 0xD0: return Value(static_cast<long long>(static_cast<std::int8_t>(be(1))));
      case 0xD1: return Value(static_cast<long long>(static_cast<std::int16_t>(be(2))));
      case 0xD2: return Value(static_cast<long long>(static_cast<std::int32_t>(be(4))));
      case 0xD3: return Value(static_cast<long long>(static_cast<std::int64_t>(be(8))));
      case 0xD9: return Value(raw(be(1)));
      case 0xDA: return Value(raw(be(2)));
      case 0xDB: return Value(raw(be(4)));
      case 0xDC: return array(be(2), depth);
      case 0xDD: return array(be(4), depth);
      case 0xDE: return map(be(2), depth);
      case 0xDF: return map(be(4), depth);
      default:
        throw DecodeError(at, "unsupported type byte 0x" + [tag] {
          const char* hex = "0123456789abcdef";
          return std::string{hex[tag >> 4], hex[tag & 0xF]};
        }());
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void Value::set_unsigned(unsigned long long u) {
  if (u <= static_cast<unsigned long long>(std::numeric_limits<std::int64_t>::max())) {
    data_ = static_cast<std::int64_t>(u);
  } else {
    data_ = static_cast<std::uint64_t>(u);
  }
}

bool Value::as_bool() const {
  if (auto* b = std::get_if<bool>(&data_)) return *b;
  type_error("a boolean");
}

std::int64_t Value::as_int() const {
  if (auto* i = std::get_if<std::int64_t>(&data_)) return *i;
  if (auto* u = std::get_if<std::uint64_t>(&data_)) return static_cast<std::int64_t>(*u);
  type_error("an integer");
}

double Value::as_double() const {
  if (auto* d = std::get_if<double>(&data_)) return *d;
  if (is_int()) return static_cast<double>(as_int());
  type_error("a number");
}

const std::string& Value::as_string() const {
  if (auto* s = std::get_if<std::string>(&data_)) return *s;
  if (auto* b = std::get_if<Binary>(&data_)) return b->bytes;
  type_error("a string");
}

const Array& Value::as_array() const {
  if (auto* a = std::get_if<Array>(&data_)) return *a;
  type_error("an array");
}

const Map& Value::as_map() const {
  if (auto* m = std::get_if<Map>(&data_)) return *m;
  type_error("a map");
}

Array& Value::as_array() {
  if (auto* a = std::get_if<Array>(&data_)) return *a;
  type_error("an array");
}

Map& Value::as_map() {
  if (auto* m = std::get_if<Map>(&data_)) return *m;
  type_error("a map");
}

const Value* Value::find(std::string_view key) const {
  auto* m = std::get_if<Map>(&data_);
  if (!m) return nullptr;
  for (const auto& [k, v] : *m) {
    if (k.is_string() && k.as_string() == key) return &v;
  }
  return nullptr;
}

std::string Value::get_string(std::string_view key, std::string fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (v->is_string()) return v->as_string();
  if (v->is_int()) return std::to_string(v->as_int());
  return fallback;
}

Value make_map(std::initializer_list<std::pair<std::string_view, Value>> entries) {
  Map m;
  m.reserve(entries.size());
  for (const auto& [k, v] : entries) m.emplace_back(Value(k), v);
  return m;
}

std::string encode(const Value& value) {
  std::string out;
  encode_into(out, value);
  return out;
}

Value decode(std::string_view bytes) { return Decoder(bytes).document(); }

nlohmann::json to_json(const Value& value) {
  const auto& v = value.storage();
  if (std::holds_alternative<std::monostate>(v)) return nullptr;
  if (auto* b = std::get_if<bool>(&v)) return *b;
  if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (auto* u = std::get_if<std::uint64_t>(&v)) return *u;
  if (auto* d = std::get_if<double>(&v)) return *d;
  if (value.is_string()) return value.as_string();
  if (auto* a = std::get_if<Array>(&v)) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : *a) out.push_back(to_json(e));
    return out;
  }
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, e] : std::get<Map>(v)) {
    std::string key = k.is_string() ? k.as_string() : to_json(k).dump();
    out[key] = to_json(e);
  }
  return out;
}

Value from_json(const nlohmann::json& value) {
  switch (value.type()) {
    case nlohmann::json::value_t::null: return Value();
    case nlohmann::json::value_t::boolean: return Value(value.get<bool>());
    case nlohmann::json::value_t::number_integer: return Value(value.get<std::int64_t>());
    case nlohmann::json::value_t::number_unsigned: return Value(static_cast<unsigned long long>(value.get<std::uint64_t>()));
    case nlohmann::json::value_t::number_float: return Value(value.get<double>());
    case nlohmann::json::value_t::string: return Value(value.get<std::string>());
    case nlohmann::json::value_t::binary: {
      const auto& bin = value.get_binary();
      return Value(Binary{std::string(bin.begin(), bin.end())});
    }
    case nlohmann::json::value_t::array: {
      Array a;
      for (const auto& e : value) a.push_back(from_json(e));
      return a;
    }
    case nlohmann::json::value_t::object: {
      Map m;
      for (const auto& [k, e] : value.items()) m.emplace_back(Value(k), from_json(e));
      return m;
    }
    default: return Value();
  }
}

}  // namespace pentestmcp::msgpack
