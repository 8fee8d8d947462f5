#include "pentestmcp/scan/nmap.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "pentestmcp/scan/xml.hpp"

namespace pentestmcp::scan {

namespace {

int parse_port(const std::string& text) {
  int value = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || p != text.data() + text.size() || value < 1 || value > 65535) {
    throw NmapFormatError("invalid port number '" + text + "'");
  }
  return value;
}

int parse_count(const std::string& text) {
  int value = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || value < 0) return 0;
  return value;
}

std::optional<Protocol> parse_protocol(const std::string& text) {
  if (text == "tcp") return Protocol::tcp;
  if (text == "udp") return Protocol::udp;
  return std::nullopt;
}

PortState parse_state(const std::string& text) {
  if (text == "open") return PortState::open;
  if (text == "closed") return PortState::closed;
  // nmap's ambiguous states collapse into filtered.
  if (text == "filtered" || text == "open|filtered" || text == "closed|filtered" || text == "unfiltered") {
    return PortState::filtered;
  }
  throw NmapFormatError("unknown port state '" + text + "'");
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.empty()) lines.emplace_back();
  return lines;
}

void render_script(std::ostringstream& out, const ScriptResult& script) {
  auto lines = split_lines(script.output);
  if (lines.size() == 1) {
    out << "|_" << script.id << ": " << lines[0] << '\n';
    return;
  }
  out << "| " << script.id << ": " << lines[0] << '\n';
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) out << "| " << lines[i] << '\n';
  out << "|_" << lines.back() << '\n';
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string_view to_string(Protocol protocol) { return protocol == Protocol::tcp ? "tcp" : "udp"; }

std::string_view to_string(PortState state) {
  switch (state) {
    case PortState::open: return "open";
    case PortState::closed: return "closed";
    case PortState::filtered: return "filtered";
  }
  return "unknown";
}

std::string ServiceRecord::version_column() const {
  std::string out = product;
  if (!version.empty()) out += (out.empty() ? "" : " ") + version;
  if (!extrainfo.empty()) out += (out.empty() ? "(" : " (") + extrainfo + ")";
  return out;
}

void normalize_services(std::vector<ServiceRecord>& services) {
  std::stable_sort(services.begin(), services.end(), [](const ServiceRecord& a, const ServiceRecord& b) {
    return std::tie(a.port, a.protocol) < std::tie(b.port, b.protocol);
  });
  services.erase(std::unique(services.begin(), services.end(),
                             [](const ServiceRecord& a, const ServiceRecord& b) {
                               return a.port == b.port && a.protocol == b.protocol;
                             }),
                 services.end());
}

NmapRun parse_nmap_xml(std::string_view document) {
  xml::Element root = xml::parse(document);
  if (root.name != "nmaprun") throw NmapFormatError("root element is <" + root.name + ">, expected <nmaprun>");

  NmapRun run;
  run.args = root.attr_or("args");
  for (const xml::Element* host : root.children_named("host")) {
    const xml::Element* status = host->child("status");
    if (status && status->attr_or("state") != "up") continue;

    ScanReport report;
    for (const xml::Element* address : host->children_named("address")) {
      auto type = address->attr_or("addrtype");
      if (type == "ipv4" || type == "ipv6") {
        report.target = address->attr_or("addr");
        break;
      }
    }
    if (const xml::Element* names = host->child("hostnames")) {
      if (const xml::Element* name = names->child("hostname")) report.hostname = name->attr_or("name");
    }
    if (report.target.empty()) report.target = report.hostname;

    if (const xml::Element* ports = host->child("ports")) {
      for (const xml::Element* port : ports->children_named("port")) {
        auto protocol = parse_protocol(port->attr_or("protocol"));
        if (!protocol) continue;  // sctp/ip are out of model
        ServiceRecord record;
        record.port = parse_port(port->attr_or("portid"));
        record.protocol = *protocol;
        const xml::Element* state = port->child("state");
        if (!state) throw NmapFormatError("port " + std::to_string(record.port) + " has no <state>");
        record.state = parse_state(state->attr_or("state"));
        if (const xml::Element* service = port->child("service")) {
          record.service = service->attr_or("name");
          record.product = service->attr_or("product");
          record.version = service->attr_or("version");
          record.extrainfo = service->attr_or("extrainfo");
        }
        for (const xml::Element* script : port->children_named("script")) {
          report.script_results.push_back(
              {script->attr_or("id"), script->attr_or("output"), record.port, record.protocol});
        }
        report.services.push_back(std::move(record));
      }
    }
    normalize_services(report.services);

    if (const xml::Element* os = host->child("os")) {
      if (const xml::Element* match = os->child("osmatch")) report.os_guess = match->attr_or("name");
    }
    if (const xml::Element* hostscript = host->child("hostscript")) {
      for (const xml::Element* script : hostscript->children_named("script")) {
        report.script_results.push_back({script->attr_or("id"), script->attr_or("output")});
      }
    }
    // Port scripts follow service order; host scripts come last.
    std::stable_sort(report.script_results.begin(), report.script_results.end(),
                     [](const ScriptResult& a, const ScriptResult& b) {
                       return std::make_tuple(a.port == 0, a.port, a.protocol) <
                              std::make_tuple(b.port == 0, b.port, b.protocol);
                     });
    run.hosts.push_back(std::move(report));
  }

  run.hosts_up = static_cast<int>(run.hosts.size());
  run.hosts_total = run.hosts_up;
  if (const xml::Element* stats = root.child("runstats")) {
    if (const xml::Element* hosts = stats->child("hosts")) {
      run.hosts_up = parse_count(hosts->attr_or("up", std::to_string(run.hosts_up)));
      run.hosts_total = parse_count(hosts->attr_or("total", std::to_string(run.hosts_total)));
    }
  }
  return run;
}

std::string render_nmap_xml(const NmapRun& run) {
  using xml::escape;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!DOCTYPE nmaprun>\n";
  out << "<nmaprun scanner=\"nmap\" args=\"" << escape(run.args)
      << "\" version=\"7.94\" xmloutputversion=\"1.05\">\n";
  for (const auto& host : run.hosts) {
    out << "<host><status state=\"up\" reason=\"echo-reply\"/>\n";
    bool v6 = host.target.find(':') != std::string::npos;
    out << "<address addr=\"" << escape(host.target) << "\" addrtype=\"" << (v6 ? "ipv6" : "ipv4") << "\"/>\n";
    out << "<hostnames>";
    if (!host.hostname.empty()) out << "<hostname name=\"" << escape(host.hostname) << "\" type=\"user\"/>";
    out << "</hostnames>\n<ports>\n";
    for (const auto& s : host.services) {
      out << "<port protocol=\"" << to_string(s.protocol) << "\" portid=\"" << s.port << "\">"
          << "<state state=\"" << to_string(s.state) << "\"/>";
      if (!s.service.empty() || !s.product.empty()) {
        out << "<service name=\"" << escape(s.service) << "\"";
        if (!s.product.empty()) out << " product=\"" << escape(s.product) << "\"";
        if (!s.version.empty()) out << " version=\"" << escape(s.version) << "\"";
        if (!s.extrainfo.empty()) out << " extrainfo=\"" << escape(s.extrainfo) << "\"";
        out << "/>";
      }
      for (const auto& script : host.script_results) {
        if (script.port == s.port && script.protocol == s.protocol) {
          out << "<script id=\"" << escape(script.id) << "\" output=\"" << escape(script.output) << "\"/>";
        }
      }
      out << "</port>\n";
    }
    out << "</ports>\n";
    if (host.os_guess) out << "<os><osmatch name=\"" << escape(*host.os_guess) << "\" accuracy=\"100\"/></os>\n";
    bool any_host_script = std::any_of(host.script_results.begin(), host.script_results.end(),
                                       [](const ScriptResult& r) { return r.port == 0; });
    if (any_host_script) {
      out << "<hostscript>";
      for (const auto& script : host.script_results) {
        if (script.port == 0) {
          out << "<script id=\"" << escape(script.id) << "\" output=\"" << escape(script.output) << "\"/>";
        }
      }
      out << "</hostscript>\n";
    }
    out << "</host>\n";
  }
  out << "<runstats><finished exit=\"success\"/><hosts up=\"" << run.hosts_up << "\" down=\""
      << (run.hosts_total - run.hosts_up) << "\" total=\"" << run.hosts_total << "\"/></runstats>\n";
  out << "</nmaprun>\n";
  return out.str();
}

std::string render_nmap_text(const NmapRun& run) {
  std::ostringstream out;
  for (const auto& host : run.hosts) {
    out << "Nmap scan report for ";
    if (!host.hostname.empty() && host.hostname != host.target) {
      out << host.hostname << " (" << host.target << ")";
    } else {
      out << host.target;
    }
    out << "\nHost is up.\n";

    if (host.services.empty()) {
      out << "All scanned ports are closed or filtered.\n";
    } else {
      std::size_t port_w = 4, state_w = 5, service_w = 7;
      bool has_version = false;
      for (const auto& s : host.services) {
        port_w = std::max(port_w, std::to_string(s.port).size() + 4);
        state_w = std::max(state_w, to_string(s.state).size());
        service_w = std::max(service_w, s.service.size());
        has_version = has_version || !s.version_column().empty();
      }
      out << pad("PORT", port_w) << ' ' << pad("STATE", state_w) << ' ';
      out << (has_version ? pad("SERVICE", service_w) + " VERSION" : "SERVICE") << '\n';
      for (const auto& s : host.services) {
        std::string line = pad(std::to_string(s.port) + "/" + std::string(to_string(s.protocol)), port_w) + ' ' +
                           pad(std::string(to_string(s.state)), state_w) + ' ';
        if (has_version && !s.version_column().empty()) {
          line += pad(s.service, service_w) + ' ' + s.version_column();
        } else {
          line += s.service;
        }
        out << line << '\n';
        for (const auto& script : host.script_results) {
          if (script.port == s.port && script.protocol == s.protocol) render_script(out, script);
        }
      }
    }
    if (host.os_guess) out << "OS details: " << *host.os_guess << '\n';
    bool header = false;
    for (const auto& script : host.script_results) {
      if (script.port != 0) continue;
      if (!header) out << "\nHost script results:\n";
      header = true;
      render_script(out, script);
    }
    out << '\n';
  }
  if (run.hosts.empty()) out << "Note: Host seems down. 0 hosts up.\n";
  out << "Nmap done: " << run.hosts_total << " IP address" << (run.hosts_total == 1 ? "" : "es") << " ("
      << run.hosts_up << " host" << (run.hosts_up == 1 ? "" : "s") << " up) scanned\n";
  return out.str();
}

nlohmann::json to_json(const NmapRun& run) {
  nlohmann::json hosts = nlohmann::json::array();
  for (const auto& host : run.hosts) {
    nlohmann::json services = nlohmann::json::array();
    for (const auto& s : host.services) {
      services.push_back({{"port", s.port},
                          {"protocol", to_string(s.protocol)},
                          {"state", to_string(s.state)},
                          {"service", s.service},
                          {"product", s.product},
                          {"version", s.version},
                          {"extrainfo", s.extrainfo}});
    }
    nlohmann::json scripts = nlohmann::json::array();
    for (const auto& r : host.script_results) {
      nlohmann::json entry = {{"id", r.id}, {"output", r.output}};
      if (r.port) entry["port"] = std::to_string(r.port) + "/" + std::string(to_string(r.protocol));
      scripts.push_back(std::move(entry));
    }
    nlohmann::json h = {{"target", host.target}, {"services", std::move(services)}, {"scripts", std::move(scripts)}};
    if (!host.hostname.empty()) h["hostname"] = host.hostname;
    if (host.os_guess) h["os_guess"] = *host.os_guess;
    hosts.push_back(std::move(h));
  }
  return {{"hosts", std::move(hosts)}, {"hosts_up", run.hosts_up}, {"hosts_total", run.hosts_total}};
}

}  // namespace pentestmcp::scan
