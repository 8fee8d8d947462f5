// Declarative mock world used by the mock exec backend and the fake
// Metasploit daemon. See scenarios/README.md for the file format.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pentestmcp/scan/nmap.hpp"
#include "pentestmcp/scan/nuclei.hpp"

namespace pentestmcp::mock {

struct FixtureScript {
  std::string id;
  std::string output;
  int port = 0;  // 0 = host script
  scan::Protocol protocol = scan::Protocol::tcp;
  std::vector<std::string> categories;
  int requires_port = 0;  // host scripts: only run when this port is scanned and open
};

struct HttpRoute {
  std::string method;
  std::string path;
  int status = 200;
  std::string reason;
  std::vector<std::string> headers;
  std::string body;
};

struct HostFixture {
  std::string address;
  std::string hostname;
  std::optional<std::string> os;
  std::vector<scan::ServiceRecord> services;
  std::vector<FixtureScript> scripts;
  std::vector<scan::VulnFinding> nuclei_findings;
  std::vector<HttpRoute> http_routes;
};

struct OptionSpec {
  std::string name;
  std::string type = "string";
  bool required = false;
  std::optional<std::string> default_value;
  std::string description;
};

struct ModuleFixture {
  std::string type;
  std::string fullname;  // "exploit/multi/http/..."
  std::string name;
  std::string rank;
  std::string disclosure_date;
  std::string description;
  std::vector<std::pair<std::string, std::string>> references;  // ("CVE", "2017-5638")
  std::optional<std::string> default_payload;
  std::vector<OptionSpec> options;

  /// fullname without the leading "<type>/".
  std::string path() const;
};

struct PayloadFixture {
  std::string name;  // "cmd/unix/reverse_bash"
  std::string display_name;
  std::string description;
  std::vector<OptionSpec> options;
};

struct SessionTemplate {
  std::string type;  // shell | meterpreter
  int peer_port = 0;
  std::string info;
};

struct ExploitRule {
  std::string module;       // fullname
  std::string target_host;  // RHOSTS must equal this
  std::vector<std::string> required_options;
  SessionTemplate session;
};

struct MsfFixture {
  std::vector<ModuleFixture> modules;
  std::vector<PayloadFixture> payloads;
  std::map<std::string, std::vector<std::string>> payload_compat;  // module fullname -> payloads
  std::vector<ExploitRule> exploit_rules;
  std::map<std::string, std::map<std::string, std::string>> session_commands;  // type -> command -> output

  const ModuleFixture* find_module(std::string_view type, std::string_view path) const;
  const PayloadFixture* find_payload(std::string_view name) const;
};

struct ScenarioFixture {
  std::string name;
  std::string attacker_ip;
  std::vector<HostFixture> hosts;
  MsfFixture msf;

  /// Host by address or hostname.
  const HostFixture* find_host(std::string_view address_or_name) const;
};

/// Load failure naming the offending field path, e.g.
/// "hosts[1].address: duplicate address 10.0.0.5".
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

ScenarioFixture parse_scenario(std::string_view text);
ScenarioFixture load_scenario(const std::filesystem::path& path);

/// Session kind a payload produces, by name.
std::string payload_session_type(std::string_view payload);

}  // namespace pentestmcp::mock
