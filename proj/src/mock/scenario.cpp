#include "pentestmcp/mock/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pentestmcp/scan/target.hpp"

namespace pentestmcp::mock {

namespace {

using Json = nlohmann::ordered_json;

/// A JSON node plus the dotted path used in error messages.
class Node {
 public:
  Node(const Json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const Json& raw() const { return value_; }

  [[noreturn]] void fail(const std::string& what) const { throw ScenarioError(path_, what); }

  bool has(const char* key) const { return value_.is_object() && value_.contains(key) && !value_[key].is_null(); }

  Node at(const char* key) const {
    if (!value_.is_object()) fail("expected an object");
    if (!value_.contains(key)) throw ScenarioError(join(key), "missing required field");
    return Node(value_[key], join(key));
  }

  std::vector<Node> items() const {
    if (!value_.is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < value_.size(); ++i) out.emplace_back(value_[i], path_ + "[" + std::to_string(i) + "]");
    return out;
  }

  std::vector<std::pair<std::string, Node>> entries() const {
    if (!value_.is_object()) fail("expected an object");
    std::vector<std::pair<std::string, Node>> out;
    for (auto it = value_.begin(); it != value_.end(); ++it) out.emplace_back(it.key(), Node(it.value(), join(it.key())));
    return out;
  }

  std::string str() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  int integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    return value_.get<int>();
  }

  bool boolean() const {
    if (!value_.is_boolean()) fail("expected a boolean");
    return value_.get<bool>();
  }

  std::string str(const char* key, std::string fallback) const { return has(key) ? at(key).str() : fallback; }

  std::vector<std::string> strings(const char* key) const {
    std::vector<std::string> out;
    if (!has(key)) return out;
    for (const auto& item : at(key).items()) out.push_back(item.str());
    return out;
  }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const Json& value_;
  std::string path_;
};

bool is_ip(const std::string& s) { return scan::is_ipv4(s) || scan::is_ipv6(s); }

scan::ServiceRecord read_service(const Node& n) {
  scan::ServiceRecord s;
  s.port = n.at("port").integer();
  if (s.port < 1 || s.port > 65535) n.at("port").fail("port must be 1-65535");
  std::string proto = n.str("protocol", "tcp");
  if (proto == "tcp") s.protocol = scan::Protocol::tcp;
  else if (proto == "udp") s.protocol = scan::Protocol::udp;
  else n.at("protocol").fail("protocol must be tcp or udp");
  std::string state = n.str("state", "open");
  if (state == "open") s.state = scan::PortState::open;
  else if (state == "closed") s.state = scan::PortState::closed;
  else if (state == "filtered") s.state = scan::PortState::filtered;
  else n.at("state").fail("state must be open, closed or filtered");
  s.service = n.str("service", "");
  s.product = n.str("product", "");
  s.version = n.str("version", "");
  s.extrainfo = n.str("extrainfo", "");
  return s;
}

FixtureScript read_script(const Node& n) {
  FixtureScript s;
  s.id = n.at("id").str();
  s.output = n.at("output").str();
  if (n.has("port")) {
    s.port = n.at("port").integer();
    if (s.port < 1 || s.port > 65535) n.at("port").fail("port must be 1-65535");
  }
  if (n.str("protocol", "tcp") == "udp") s.protocol = scan::Protocol::udp;
  s.categories = n.strings("categories");
  if (n.has("requires_port")) s.requires_port = n.at("requires_port").integer();
  return s;
}

HttpRoute read_route(const Node& n) {
  HttpRoute r;
  r.method = n.str("method", "GET");
  r.path = n.at("path").str();
  if (r.path.empty() || r.path.front() != '/') n.at("path").fail("path must start with '/'");
  if (n.has("status")) r.status = n.at("status").integer();
  r.reason = n.str("reason", r.status == 200 ? "OK" : "");
  r.headers = n.strings("headers");
  r.body = n.str("body", "");
  return r;
}

bool finding_matches_host(const std::string& matched_at, const std::string& address) {
  if (auto url = scan::parse_http_url(matched_at)) return url->host == address;
  return matched_at == address || matched_at.rfind(address + ":", 0) == 0;
}

HostFixture read_host(const Node& n) {
  HostFixture h;
  h.address = n.at("address").str();
  if (!is_ip(h.address)) n.at("address").fail("not a valid IP address: '" + h.address + "'");
  h.hostname = n.str("hostname", "");
  if (n.has("os")) h.os = n.at("os").str();

  std::set<std::pair<int, scan::Protocol>> seen;
  if (n.has("services")) {
    for (const auto& item : n.at("services").items()) {
      auto s = read_service(item);
      if (!seen.insert({s.port, s.protocol}).second) item.fail("duplicate port " + std::to_string(s.port));
      h.services.push_back(std::move(s));
    }
  }
  scan::normalize_services(h.services);
  if (n.has("nmap_scripts")) {
    for (const auto& item : n.at("nmap_scripts").items()) h.scripts.push_back(read_script(item));
  }
  if (n.has("nuclei_findings")) {
    for (const auto& item : n.at("nuclei_findings").items()) {
      scan::VulnFinding f;
      f.template_id = item.at("template_id").str();
      auto severity = scan::parse_severity(item.at("severity").str());
      if (!severity) item.at("severity").fail("unknown severity");
      f.severity = *severity;
      f.matched_at = item.at("matched_at").str();
      if (!finding_matches_host(f.matched_at, h.address)) {
        item.at("matched_at").fail("does not refer to host " + h.address);
      }
      h.nuclei_findings.push_back(std::move(f));
    }
  }
  if (n.has("http_routes")) {
    for (const auto& item : n.at("http_routes").items()) h.http_routes.push_back(read_route(item));
  }
  return h;
}

std::vector<OptionSpec> read_options(const Node& n) {
  std::vector<OptionSpec> out;
  std::set<std::string> names;
  for (const auto& item : n.items()) {
    OptionSpec o;
    o.name = item.at("name").str();
    if (!names.insert(o.name).second) item.fail("duplicate option " + o.name);
    o.type = item.str("type", "string");
    if (item.has("required")) o.required = item.at("required").boolean();
    if (item.has("default")) {
      const Json& d = item.at("default").raw();
      o.default_value = d.is_string() ? d.get<std::string>() : d.dump();
    }
    o.description = item.str("description", "");
    out.push_back(std::move(o));
  }
  return out;
}

ModuleFixture read_module(const Node& n) {
  ModuleFixture m;
  m.type = n.at("type").str();
  static const std::set<std::string> kTypes = {"exploit", "auxiliary", "post", "payload"};
  if (!kTypes.count(m.type)) n.at("type").fail("unknown module type '" + m.type + "'");
  m.fullname = n.at("fullname").str();
  if (m.fullname.empty() || m.fullname.front() == '/') n.at("fullname").fail("must be non-empty without leading '/'");
  if (m.fullname.rfind(m.type + "/", 0) != 0) n.at("fullname").fail("must start with '" + m.type + "/'");
  m.name = n.str("name", m.fullname);
  m.rank = n.str("rank", "normal");
  m.disclosure_date = n.str("disclosure_date", "");
  m.description = n.str("description", "");
  if (n.has("references")) {
    for (const auto& ref : n.at("references").items()) {
      auto parts = ref.items();
      if (parts.size() != 2) ref.fail("reference must be [kind, id]");
      m.references.emplace_back(parts[0].str(), parts[1].str());
    }
  }
  if (n.has("default_payload")) m.default_payload = n.at("default_payload").str();
  if (n.has("options")) m.options = read_options(n.at("options"));
  return m;
}

PayloadFixture read_payload(const Node& n) {
  PayloadFixture p;
  p.name = n.at("name").str();
  p.display_name = n.str("display_name", p.name);
  p.description = n.str("description", "");
  if (n.has("options")) p.options = read_options(n.at("options"));
  return p;
}

MsfFixture read_msf(const Node& n, const ScenarioFixture& scenario) {
  MsfFixture msf;
  std::set<std::string> fullnames;
  if (n.has("modules")) {
    for (const auto& item : n.at("modules").items()) {
      auto m = read_module(item);
      if (!fullnames.insert(m.fullname).second) item.fail("duplicate module " + m.fullname);
      msf.modules.push_back(std::move(m));
    }
  }
  if (n.has("payloads")) {
    for (const auto& item : n.at("payloads").items()) msf.payloads.push_back(read_payload(item));
  }
  if (n.has("payload_compat")) {
    for (const auto& [module, list] : n.at("payload_compat").entries()) {
      if (!fullnames.count(module)) list.fail("unknown module " + module);
      std::vector<std::string> payloads;
      for (const auto& p : list.items()) payloads.push_back(p.str());
      msf.payload_compat[module] = std::move(payloads);
    }
  }
  if (n.has("session_commands")) {
    for (const auto& [type, table] : n.at("session_commands").entries()) {
      if (type != "shell" && type != "meterpreter") table.fail("session type must be shell or meterpreter");
      for (const auto& [command, output] : table.entries()) msf.session_commands[type][command] = output.str();
    }
  }
  if (n.has("exploit_rules")) {
    for (const auto& item : n.at("exploit_rules").items()) {
      ExploitRule rule;
      rule.module = item.at("module").str();
      if (!fullnames.count(rule.module)) item.at("module").fail("unknown module " + rule.module);
      rule.target_host = item.at("target_host").str();
      if (!scenario.find_host(rule.target_host)) item.at("target_host").fail("not a host in this scenario");
      rule.required_options = item.strings("required_options");
      Node session = item.at("session");
      rule.session.type = session.at("type").str();
      if (rule.session.type != "shell" && rule.session.type != "meterpreter") {
        session.at("type").fail("session type must be shell or meterpreter");
      }
      auto commands = msf.session_commands.find(rule.session.type);
      if (commands == msf.session_commands.end() || commands->second.empty()) {
        session.at("type").fail("no session_commands for session type " + rule.session.type);
      }
      if (session.has("peer_port")) rule.session.peer_port = session.at("peer_port").integer();
      rule.session.info = session.str("info", "");
      msf.exploit_rules.push_back(std::move(rule));
    }
  }
  return msf;
}

}  // namespace

std::string ModuleFixture::path() const {
  return fullname.rfind(type + "/", 0) == 0 ? fullname.substr(type.size() + 1) : fullname;
}

const ModuleFixture* MsfFixture::find_module(std::string_view type, std::string_view path) const {
  for (const auto& m : modules) {
    if (m.type == type && (m.path() == path || m.fullname == path)) return &m;
  }
  return nullptr;
}

const PayloadFixture* MsfFixture::find_payload(std::string_view name) const {
  for (const auto& p : payloads) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const HostFixture* ScenarioFixture::find_host(std::string_view address_or_name) const {
  for (const auto& h : hosts) {
    if (h.address == address_or_name || (!h.hostname.empty() && h.hostname == address_or_name)) return &h;
  }
  return nullptr;
}

std::string payload_session_type(std::string_view payload) {
  return payload.find("meterpreter") != std::string_view::npos ? "meterpreter" : "shell";
}

ScenarioFixture parse_scenario(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError("<document>", std::string("not valid JSON: ") + e.what());
  }
  Node root(doc, "");
  ScenarioFixture s;
  s.name = root.at("name").str();
  if (s.name.empty()) root.at("name").fail("must be non-empty");
  s.attacker_ip = root.at("attacker_ip").str();
  if (!is_ip(s.attacker_ip)) root.at("attacker_ip").fail("not a valid IP address: '" + s.attacker_ip + "'");

  std::set<std::string> addresses{s.attacker_ip};
  for (const auto& item : root.at("hosts").items()) {
    HostFixture h = read_host(item);
    if (!addresses.insert(h.address).second) item.at("address").fail("duplicate address " + h.address);
    s.hosts.push_back(std::move(h));
  }
  if (root.has("msf")) s.msf = read_msf(root.at("msf"), s);
  return s;
}

ScenarioFixture load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path.string(), "cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace pentestmcp::mock
