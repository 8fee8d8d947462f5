#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "msgpack_gen.hpp"
#include "pentestmcp/msf/msgpack.hpp"

using namespace pentestmcp::msgpack;
using nlohmann::json;
using testsupport::random_json;
using testsupport::random_value;

namespace {

std::string bytes(std::initializer_list<int> b) {
  std::string s;
  for (int c : b) s += static_cast<char>(c);
  return s;
}

}  // namespace

TEST_SUITE("msgpack") {
  TEST_CASE("known encodings") {
    CHECK(encode(Value()) == bytes({0xc0}));
    CHECK(encode(Value(true)) == bytes({0xc3}));
    CHECK(encode(Value(5)) == bytes({0x05}));
    CHECK(encode(Value(-1)) == bytes({0xff}));
    CHECK(encode(Value(-33)) == bytes({0xd0, 0xdf}));
    CHECK(encode(Value(200)) == bytes({0xcc, 0xc8}));
    CHECK(encode(Value(65536)) == bytes({0xce, 0x00, 0x01, 0x00, 0x00}));
    CHECK(encode(Value("abc")) == bytes({0xa3, 'a', 'b', 'c'}));
    CHECK(encode(Value(Binary{"\x01"})) == bytes({0xc4, 0x01, 0x01}));
    CHECK(encode(Value(Array{1, 2})) == bytes({0x92, 0x01, 0x02}));
    CHECK(encode(make_map({{"a", 1}})) == bytes({0x81, 0xa1, 'a', 0x01}));
    CHECK(encode(Value(1.5)) == bytes({0xcb, 0x3f, 0xf8, 0, 0, 0, 0, 0, 0}));
    CHECK(encode(Value(std::string(32, 'x'))).substr(0, 2) == bytes({0xd9, 32}));
  }

  TEST_CASE("decodes every width the daemon may send") {
    CHECK(decode(bytes({0xca, 0x3f, 0xc0, 0x00, 0x00})) == Value(1.5));
    CHECK(decode(bytes({0xd1, 0xff, 0x00})) == Value(-256));
    CHECK(decode(bytes({0xcd, 0x01, 0x00})) == Value(256));
    CHECK(decode(bytes({0xcf, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff})) ==
          Value(static_cast<unsigned long long>(std::numeric_limits<std::uint64_t>::max())));
    CHECK(decode(bytes({0xda, 0x00, 0x01, 'z'})) == Value("z"));
    CHECK(decode(bytes({0xdc, 0x00, 0x01, 0xc0})) == Value(Array{Value()}));
    CHECK(decode(bytes({0xde, 0x00, 0x01, 0x01, 0xc2})) == Value(Map{{Value(1), Value(false)}}));
    Value bin = decode(bytes({0xc4, 0x02, 'h', 'i'}));
    CHECK(bin.is_string());
    CHECK(bin.as_string() == "hi");
  }

  TEST_CASE("malformed input reports the offending offset") {
    auto offset = [](const std::string& b) -> std::size_t {
      try {
        decode(b);
      } catch (const DecodeError& e) {
        return e.offset();
      }
      return static_cast<std::size_t>(-1);
    };
    CHECK(offset("") == 0);
    CHECK(offset(bytes({0xa3, 'a'})) == 1);
    CHECK(offset(bytes({0x92, 0x01})) == 1);
    CHECK(offset(bytes({0x92, 0x01, 0xa2, 0x61})) == 3);
    CHECK(offset(bytes({0x01, 0x02})) == 1);
    CHECK(offset(bytes({0xc1})) == 0);
    CHECK(offset(bytes({0xdd, 0xff, 0xff, 0xff, 0xff})) == 5);
    std::string deep(2000, static_cast<char>(0x91));
    deep += static_cast<char>(0xc0);
    CHECK_THROWS_AS(decode(deep), DecodeError);
  }

  TEST_CASE("randomized round-trips") {
    std::mt19937_64 rng(0x5638);
    for (int i = 0; i < 2000; ++i) {
      Value v = random_value(rng, 0);
      std::string enc = encode(v);
      Value back = decode(enc);
      REQUIRE(back == v);
      REQUIRE(encode(back) == enc);
    }
  }

  TEST_CASE("byte-identical to nlohmann for float-free documents") {
    std::mt19937_64 rng(0x0144);
    for (int i = 0; i < 300; ++i) {
      json j = random_json(rng, 0, false);
      std::vector<std::uint8_t> theirs = json::to_msgpack(j);
      std::string ours = encode(from_json(j));
      CAPTURE(j.dump());
      REQUIRE(ours == std::string(theirs.begin(), theirs.end()));
    }
  }

  TEST_CASE("each codec decodes the other's output to the same document") {
    std::mt19937_64 rng(0xbeef);
    for (int i = 0; i < 300; ++i) {
      json j = random_json(rng, 0, true);
      std::string ours = encode(from_json(j));
      CAPTURE(j.dump());
      REQUIRE(json::from_msgpack(ours) == j);
      std::vector<std::uint8_t> theirs = json::to_msgpack(j);
      REQUIRE(to_json(decode(std::string(theirs.begin(), theirs.end()))) == j);
    }
  }

  TEST_CASE("accessors and lookups") {
    Value m = make_map({{"token", "TEMP1"}, {"count", 3}});
    CHECK(m.find("token")->as_string() == "TEMP1");
    CHECK(m.find("missing") == nullptr);
    CHECK(m.get_string("count", "x") == "3");
    CHECK(m.get_string("nope", "fb") == "fb");
    CHECK(Value(3).find("x") == nullptr);
    CHECK_THROWS(Value(3).as_string());
    CHECK(Value(static_cast<unsigned long long>(7)) == Value(7));
    CHECK(Value(7).as_double() == 7.0);
    CHECK(to_json(Value(Map{{Value(1), Value("a")}})) == json{{"1", "a"}});
  }
}
