#include "doctest.h"
#include "pentestmcp/mock/mock_exec.hpp"
#include "support.hpp"

using namespace pentestmcp;
using namespace pentestmcp::mock;

namespace {

scan::NmapRun nmap(const std::string& scenario, std::vector<std::string> args) {
  args.insert(args.begin(), "nmap");
  args.insert(args.end(), {"-oX", "-"});
  auto out = mock_exec(*testsupport::scenario(scenario), args);
  REQUIRE(out.exit_code == 0);
  return scan::parse_nmap_xml(out.out);
}

std::vector<int> ports(const scan::ScanReport& r) {
  std::vector<int> out;
  for (const auto& s : r.services) out.push_back(s.port);
  return out;
}

std::vector<std::string> script_ids(const scan::ScanReport& r) {
  std::vector<std::string> out;
  for (const auto& s : r.script_results) out.push_back(s.id);
  return out;
}

}  // namespace

TEST_SUITE("mock exec") {
  TEST_CASE("nmap -sV -sC reports the fixture services and default scripts") {
    auto run = nmap("struts-5638", {"-sV", "-sC", "-p-", "10.138.0.19"});
    CHECK(run.hosts_up == 1);
    CHECK(run.hosts_total == 1);
    REQUIRE(run.hosts.size() == 1);
    const auto& host = run.hosts[0];
    CHECK(host.hostname == "struts-web");
    CHECK(ports(host) == std::vector<int>{22, 80});
    CHECK(host.services[1].product == "Apache Tomcat/Coyote JSP engine");
    CHECK(host.services[1].version == "1.1");
    CHECK(script_ids(host) == std::vector<std::string>{"ssh-hostkey", "http-title", "http-methods"});
    CHECK_FALSE(host.os_guess.has_value());
  }

  TEST_CASE("without -sV version columns are empty") {
    auto run = nmap("struts-5638", {"-p80", "struts-web"});
    REQUIRE(run.hosts.size() == 1);
    CHECK(ports(run.hosts[0]) == std::vector<int>{80});
    CHECK(run.hosts[0].services[0].service == "http");
    CHECK(run.hosts[0].services[0].product.empty());
    CHECK(run.hosts[0].script_results.empty());
  }

  TEST_CASE("a bare script family selects host scripts gated on their port") {
    auto run = nmap("blue-0144", {"-p445", "--script", "smb-vuln-ms17-010,smb-protocols,smb", "10.201.77.154"});
    REQUIRE(run.hosts.size() == 1);
    CHECK(ports(run.hosts[0]) == std::vector<int>{445});
    CHECK(script_ids(run.hosts[0]) == std::vector<std::string>{"smb-vuln-ms17-010", "smb-protocols", "smb-enum-shares",
                                                               "smb-security-mode", "smb-os-discovery"});
    for (const auto& s : run.hosts[0].script_results) CHECK(s.port == 0);

    auto elsewhere = nmap("blue-0144", {"-p135", "--script", "smb", "10.201.77.154"});
    CHECK(elsewhere.hosts[0].script_results.empty());
  }

  TEST_CASE("-O adds the OS guess only when a port is open") {
    auto run = nmap("blue-0144", {"-sS", "-sV", "-O", "10.201.77.154"});
    REQUIRE(run.hosts[0].os_guess.has_value());
    CHECK(run.hosts[0].os_guess->rfind("Microsoft Windows 7", 0) == 0);
    CHECK(run.hosts[0].services.size() == 7);
    auto closed = nmap("blue-0144", {"-O", "-p1", "10.201.77.154"});
    CHECK_FALSE(closed.hosts[0].os_guess.has_value());
  }

  TEST_CASE("unknown hosts are down and CIDR totals count the range") {
    auto none = nmap("struts-5638", {"10.138.0.99"});
    CHECK(none.hosts_up == 0);
    CHECK(none.hosts_total == 1);
    auto sweep = nmap("struts-5638", {"-sn", "10.138.0.0/24"});
    CHECK(sweep.hosts_up == 1);
    CHECK(sweep.hosts_total == 256);
    CHECK(sweep.hosts[0].services.empty());
  }

  TEST_CASE("nmap argument errors and unresolvable names") {
    auto fx = testsupport::scenario("struts-5638");
    auto bad = mock_exec(*fx, {"nmap", "-p", "99999", "10.138.0.19"});
    CHECK(bad.exit_code == 1);
    CHECK(bad.err.find("Your port specifications are illegal") != std::string::npos);
    auto unresolved = mock_exec(*fx, {"nmap", "nowhere.lab"});
    CHECK(unresolved.exit_code == 0);
    CHECK(unresolved.err == "Failed to resolve \"nowhere.lab\".\n");
    auto text = mock_exec(*fx, {"nmap", "-sV", "10.138.0.19"});
    CHECK(text.out.find("80/tcp open  http") != std::string::npos);
  }

  TEST_CASE("nuclei emits the fixture findings with filters") {
    auto fx = testsupport::scenario("struts-5638");
    auto all = mock_exec(*fx, {"nuclei", "-u", "http://10.138.0.19/", "-jsonl", "-silent"});
    REQUIRE(all.exit_code == 0);
    auto findings = scan::parse_nuclei_jsonl(all.out);
    REQUIRE(findings.size() == 3);
    CHECK(findings[1].template_id == "CVE-2017-5638");
    CHECK(findings[1].matched_at == "http://10.138.0.19/struts2-showcase/");
    CHECK(findings == fx->hosts[0].nuclei_findings);

    auto by_id = mock_exec(*fx, {"nuclei", "-u", "10.138.0.19", "-id", "cve-2017-5638", "-jsonl"});
    CHECK(scan::parse_nuclei_jsonl(by_id.out).size() == 1);
    auto low = mock_exec(*fx, {"nuclei", "-u", "10.138.0.19", "-severity", "low,medium", "-jsonl"});
    CHECK(low.out.empty());
    auto text = mock_exec(*fx, {"nuclei", "-u", "http://10.138.0.19"});
    CHECK(text.out.find("[CVE-2017-5638]") != std::string::npos);
    auto other = mock_exec(*fx, {"nuclei", "-u", "http://10.9.9.9", "-jsonl"});
    CHECK(other.exit_code == 0);
    CHECK(other.out.empty());
    CHECK(mock_exec(*fx, {"nuclei", "-jsonl"}).exit_code == 1);
  }

  TEST_CASE("curl serves routes, 404s and refuses closed ports") {
    auto fx = testsupport::scenario("struts-5638");
    auto page = mock_exec(*fx, {"curl", "-s", "-i", "http://10.138.0.19/struts2-showcase/"});
    REQUIRE(page.exit_code == 0);
    CHECK(page.out.rfind("HTTP/1.1 200 OK\r\n", 0) == 0);
    CHECK(page.out.find("<title>Struts2 Showcase</title>") != std::string::npos);

    auto redirect = mock_exec(*fx, {"curl", "-I", "http://struts-web/"});
    CHECK(redirect.out.rfind("HTTP/1.1 302 Found\r\nLocation: /struts2-showcase/\r\n", 0) == 0);
    CHECK(redirect.out.ends_with("\r\n\r\n"));

    auto missing = mock_exec(*fx, {"curl", "-s", "http://10.138.0.19/nope"});
    CHECK(missing.exit_code == 0);
    CHECK(missing.out.find("404 Not Found") != std::string::npos);
    CHECK(mock_exec(*fx, {"curl", "-f", "http://10.138.0.19/nope"}).exit_code == 22);

    auto refused = mock_exec(*fx, {"curl", "http://10.138.0.19:8080/"});
    CHECK(refused.exit_code == 7);
    CHECK(refused.err.find("Failed to connect to 10.138.0.19 port 8080") != std::string::npos);
    CHECK(mock_exec(*fx, {"curl", "-s"}).exit_code == 2);
  }

  TEST_CASE("unknown binaries exit 127 and output is deterministic") {
    auto fx = testsupport::scenario("blue-0144");
    auto r = mock_exec(*fx, {"/usr/bin/hydra", "-l", "root"});
    CHECK(r.exit_code == 127);
    CHECK(r.err == "hydra: command not found\n");
    CHECK(mock_exec(*fx, {}).exit_code == 127);
    std::vector<std::string> argv = {"nmap", "-sV", "-sC", "10.201.77.154"};
    CHECK(mock_exec(*fx, argv).out == mock_exec(*fx, argv).out);
  }

  TEST_CASE("the backend records every invocation") {
    MockExecBackend backend(testsupport::scenario("struts-5638"));
    backend.run({"nmap", "10.138.0.19"}, {}, std::chrono::seconds(5));
    backend.run({"curl", "http://10.138.0.19/"}, {}, std::chrono::seconds(5));
    auto calls = backend.invocations();
    REQUIRE(calls.size() == 2);
    CHECK(calls[0] == std::vector<std::string>{"nmap", "10.138.0.19"});
    CHECK(calls[1][0] == "curl");
  }
}
