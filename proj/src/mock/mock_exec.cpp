#include "pentestmcp/mock/mock_exec.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <optional>
#include <set>
#include <sstream>

#include "pentestmcp/scan/nmap.hpp"
#include "pentestmcp/scan/nuclei.hpp"
#include "pentestmcp/scan/target.hpp"

namespace pentestmcp::mock {

namespace {

using scan::PortState;
using scan::Protocol;

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(sep, start);
    if (end == std::string_view::npos) end = text.size();
    if (end > start) out.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::optional<int> to_int(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

ProcessOutput result(int code, std::string out, std::string err = {}) {
  ProcessOutput p;
  p.exit_code = code;
  p.out = std::move(out);
  p.err = std::move(err);
  return p;
}

// --- address matching -------------------------------------------------------

int cidr_size(std::string_view cidr) {
  auto bits = to_int(cidr.substr(cidr.find('/') + 1)).value_or(32);
  if (cidr.find(':') != std::string_view::npos) return -1;
  return bits <= 1 ? (1 << 30) : 1 << (32 - bits);
}

// --- nmap -------------------------------------------------------------------

struct PortRange {
  int lo;
  int hi;
  std::optional<Protocol> protocol;
};

struct NmapArgs {
  std::vector<std::string> targets;
  std::optional<std::vector<PortRange>> ports;  // nullopt: default port set
  bool version = false;
  bool os = false;
  bool default_scripts = false;
  std::vector<std::string> scripts;
  bool tcp = false;
  bool udp = false;
  bool ping_only = false;
  bool xml_stdout = false;
};

std::optional<std::vector<PortRange>> parse_port_spec(std::string_view spec) {
  std::vector<PortRange> out;
  std::optional<Protocol> proto;
  for (auto item : split(spec, ',')) {
    std::string_view part = item;
    if (part.size() > 2 && part[1] == ':') {
      if (part[0] == 'T') proto = Protocol::tcp;
      else if (part[0] == 'U') proto = Protocol::udp;
      else return std::nullopt;
      part.remove_prefix(2);
    }
    auto dash = part.find('-');
    int lo = 0, hi = 0;
    if (dash == std::string_view::npos) {
      auto v = to_int(part);
      if (!v) return std::nullopt;
      lo = hi = *v;
    } else {
      auto a = part.substr(0, dash), b = part.substr(dash + 1);
      auto va = a.empty() ? std::optional<int>(1) : to_int(a);
      auto vb = b.empty() ? std::optional<int>(65535) : to_int(b);
      if (!va || !vb) return std::nullopt;
      lo = *va;
      hi = *vb;
    }
    if (lo < 0 || hi > 65535 || lo > hi) return std::nullopt;
    out.push_back({lo, hi, proto});
  }
  if (out.empty()) return std::nullopt;
  return out;
}

const std::set<std::string> kNmapValueFlags = {
    "--script-args", "--top-ports", "--max-retries", "-e", "--exclude", "-iL", "--min-rate", "--max-rate",
    "--host-timeout", "-S", "-D", "-g", "--source-port", "--data-length", "--ttl", "--version-intensity",
    "--min-hostgroup", "--max-hostgroup", "--scan-delay", "--max-scan-delay", "--dns-servers", "--datadir",
    "-oN", "-oG", "-oA", "-oS", "--excludefile", "--min-parallelism", "--max-parallelism", "--mtu"};

std::optional<NmapArgs> parse_nmap_args(const std::vector<std::string>& argv, std::string& error) {
  NmapArgs a;
  bool scan_type_given = false;
  for (std::size_t i = 1; i < argv.size(); ++i) {
    const std::string& t = argv[i];
    auto next = [&]() -> std::optional<std::string> {
      if (i + 1 >= argv.size()) return std::nullopt;
      return argv[++i];
    };
    if (t == "-p") {
      auto v = next();
      if (!v || !(a.ports = parse_port_spec(*v == "-" ? "1-65535" : *v))) {
        error = "Error #485: Your port specifications are illegal.";
        return std::nullopt;
      }
    } else if (t.rfind("-p", 0) == 0 && t.size() > 2) {
      std::string spec = t.substr(2);
      if (!(a.ports = parse_port_spec(spec == "-" ? "1-65535" : spec))) {
        error = "Error #485: Your port specifications are illegal.";
        return std::nullopt;
      }
    } else if (t == "-sV") {
      a.version = true;
    } else if (t == "-O") {
      a.os = true;
    } else if (t == "-sC") {
      a.default_scripts = true;
    } else if (t == "-A") {
      a.version = a.os = a.default_scripts = true;
    } else if (t == "-sU") {
      a.udp = true;
    } else if (t == "-sS" || t == "-sT" || t == "-sA" || t == "-sF" || t == "-sN" || t == "-sX") {
      a.tcp = true;
      scan_type_given = true;
    } else if (t == "-sn") {
      a.ping_only = true;
    } else if (t == "--script") {
      auto v = next();
      if (!v) {
        error = "--script requires an argument";
        return std::nullopt;
      }
      for (auto& s : split(*v, ',')) a.scripts.push_back(s);
    } else if (t.rfind("--script=", 0) == 0) {
      for (auto& s : split(t.substr(9), ',')) a.scripts.push_back(s);
    } else if (t == "-oX") {
      auto v = next();
      if (v && *v == "-") a.xml_stdout = true;
    } else if (kNmapValueFlags.count(t)) {
      next();
    } else if (!t.empty() && t[0] == '-') {
      // Timing templates, ping options, verbosity and the like do not
      // change the synthesized result.
    } else {
      a.targets.push_back(t);
    }
  }
  if (!a.udp || scan_type_given) a.tcp = true;
  return a;
}

bool port_selected(const NmapArgs& a, int port, Protocol proto) {
  if (a.ping_only) return false;
  if (proto == Protocol::tcp && !a.tcp) return false;
  if (proto == Protocol::udp && !a.udp) return false;
  if (!a.ports) return true;
  return std::any_of(a.ports->begin(), a.ports->end(), [&](const PortRange& r) {
    return port >= r.lo && port <= r.hi && (!r.protocol || *r.protocol == proto);
  });
}

bool script_selected(const NmapArgs& a, const FixtureScript& s) {
  auto has_category = [&](std::string_view c) {
    return std::find(s.categories.begin(), s.categories.end(), c) != s.categories.end();
  };
  if (a.default_scripts && has_category("default")) return true;
  for (const auto& pattern : a.scripts) {
    if (pattern == "all" || pattern == "*" || pattern == s.id || has_category(pattern)) return true;
    if (!pattern.empty() && pattern.back() == '*' && s.id.rfind(pattern.substr(0, pattern.size() - 1), 0) == 0) {
      return true;
    }
    // A bare family name such as "smb" selects every "smb-*" script.
    if (s.id.rfind(pattern + "-", 0) == 0) return true;
  }
  return false;
}

scan::ScanReport scan_host(const HostFixture& host, const NmapArgs& a) {
  scan::ScanReport r;
  r.target = host.address;
  r.hostname = host.hostname;
  std::set<std::pair<int, Protocol>> open;
  for (const auto& s : host.services) {
    if (!port_selected(a, s.port, s.protocol)) continue;
    scan::ServiceRecord rec = s;
    if (!a.version) {
      rec.product.clear();
      rec.version.clear();
      rec.extrainfo.clear();
    }
    if (rec.state == PortState::open) open.insert({rec.port, rec.protocol});
    r.services.push_back(std::move(rec));
  }
  if (a.os && host.os && !open.empty()) r.os_guess = host.os;
  for (const auto& s : host.scripts) {
    if (!script_selected(a, s)) continue;
    if (s.port != 0) {
      if (!open.count({s.port, s.protocol})) continue;
    } else if (s.requires_port != 0) {
      if (!open.count({s.requires_port, Protocol::tcp})) continue;
    } else if (open.empty() && !a.ping_only) {
      continue;
    }
    r.script_results.push_back({s.id, s.output, s.port, s.protocol});
  }
  std::stable_sort(r.script_results.begin(), r.script_results.end(),
                   [](const scan::ScriptResult& x, const scan::ScriptResult& y) {
                     auto key = [](const scan::ScriptResult& s) {
                       return std::make_tuple(s.port == 0, s.port, static_cast<int>(s.protocol));
                     };
                     return key(x) < key(y);
                   });
  return r;
}

std::string join_args(const std::vector<std::string>& argv) {
  std::string out;
  for (std::size_t i = 0; i < argv.size(); ++i) out += (i ? " " : "") + argv[i];
  return out;
}

ProcessOutput run_nmap(const ScenarioFixture& fx, const std::vector<std::string>& argv) {
  std::string error;
  auto args = parse_nmap_args(argv, error);
  if (!args) return result(1, "", error + "\nQUITTING!\n");

  scan::NmapRun run;
  run.args = join_args(argv);
  std::string err;
  std::set<std::string> seen;
  for (const auto& target : args->targets) {
    if (scan::is_cidr(target)) {
      int size = cidr_size(target);
      int matched = 0;
      for (const auto& h : fx.hosts) {
        if (scan::cidr_contains(target, h.address) && seen.insert(h.address).second) {
          run.hosts.push_back(scan_host(h, *args));
          ++matched;
        }
      }
      run.hosts_total += size < 0 ? matched : size;
    } else if (scan::is_ipv4(target) || scan::is_ipv6(target)) {
      ++run.hosts_total;
      if (const HostFixture* h = fx.find_host(target); h && seen.insert(h->address).second) {
        run.hosts.push_back(scan_host(*h, *args));
      }
    } else if (const HostFixture* h = fx.find_host(target)) {
      ++run.hosts_total;
      if (seen.insert(h->address).second) run.hosts.push_back(scan_host(*h, *args));
    } else {
      err += "Failed to resolve \"" + target + "\".\n";
    }
  }
  if (args->targets.empty()) err += "WARNING: No targets were specified, so 0 hosts scanned.\n";
  run.hosts_up = static_cast<int>(run.hosts.size());
  std::string out = args->xml_stdout ? scan::render_nmap_xml(run) : scan::render_nmap_text(run);
  return result(0, std::move(out), std::move(err));
}

// --- nuclei -----------------------------------------------------------------

const std::set<std::string> kNucleiValueFlags = {"-tags", "-etags", "-rl", "-rate-limit", "-c", "-timeout",
                                                 "-retries", "-H", "-header", "-es", "-exclude-severity",
                                                 "-bs", "-stats-interval", "-p", "-proxy"};

std::string target_host(std::string_view target) {
  if (auto url = scan::parse_http_url(target)) return url->host;
  std::string t(target);
  if (t.size() > 2 && t.front() == '[') return t.substr(1, t.find(']') - 1);
  if (std::count(t.begin(), t.end(), ':') == 1) return t.substr(0, t.find(':'));
  return t;
}

ProcessOutput run_nuclei(const ScenarioFixture& fx, const std::vector<std::string>& argv) {
  std::vector<std::string> targets;
  std::vector<std::string> severities, ids;
  bool jsonl = false;
  for (std::size_t i = 1; i < argv.size(); ++i) {
    const std::string& t = argv[i];
    auto next = [&]() { return i + 1 < argv.size() ? argv[++i] : std::string(); };
    if (t == "-u" || t == "-target" || t == "--target") {
      targets.push_back(next());
    } else if (t == "-severity" || t == "-s") {
      for (auto& s : split(next(), ',')) severities.push_back(lower(s));
    } else if (t == "-id" || t == "-t" || t == "-templates") {
      for (auto& s : split(next(), ',')) ids.push_back(lower(s));
    } else if (t == "-jsonl" || t == "-j" || t == "-json") {
      jsonl = true;
    } else if (kNucleiValueFlags.count(t)) {
      next();
    }
  }
  if (targets.empty() || targets.front().empty()) return result(1, "", "[FTL] Could not run nuclei: no input provided\n");

  std::string out;
  for (const auto& target : targets) {
    const HostFixture* host = fx.find_host(target_host(target));
    if (!host) continue;
    for (const auto& f : host->nuclei_findings) {
      if (!severities.empty() &&
          std::find(severities.begin(), severities.end(), scan::to_string(f.severity)) == severities.end()) {
        continue;
      }
      if (!ids.empty() && std::find(ids.begin(), ids.end(), lower(f.template_id)) == ids.end()) continue;
      out += (jsonl ? scan::to_jsonl_record(f).dump() : scan::render_finding(f)) + "\n";
    }
  }
  return result(0, std::move(out));
}

// --- curl -------------------------------------------------------------------

const std::set<std::string> kCurlValueFlags = {"-m", "--max-time", "--connect-timeout", "-A", "--user-agent",
                                               "-e", "--referer", "-u", "--user", "-b", "--cookie", "-x",
                                               "--proxy", "-w", "--write-out", "-F", "--form", "--retry"};
const std::set<std::string> kCurlDataFlags = {"-d", "--data", "--data-binary", "--data-raw", "--data-urlencode",
                                              "--data-ascii"};

std::string reason_for(int status) {
  switch (status) {
    case 200: return "OK";
    case 201: return "Created";
    case 204: return "No Content";
    case 301: return "Moved Permanently";
    case 302: return "Found";
    case 400: return "Bad Request";
    case 401: return "Unauthorized";
    case 403: return "Forbidden";
    case 404: return "Not Found";
    case 405: return "Method Not Allowed";
    case 500: return "Internal Server Error";
    default: return "";
  }
}

const HttpRoute* find_route(const HostFixture& host, const std::string& method, const std::string& path) {
  std::string bare = path.substr(0, path.find('?'));
  for (const std::string* candidate : std::array<const std::string*, 2>{&path, &bare}) {
    for (const auto& r : host.http_routes) {
      if (r.path == *candidate && (r.method == method || (method == "HEAD" && r.method == "GET"))) return &r;
    }
  }
  return nullptr;
}

ProcessOutput run_curl(const ScenarioFixture& fx, const std::vector<std::string>& argv) {
  std::string method, url;
  bool include = false, head = false, fail = false, has_data = false;
  for (std::size_t i = 1; i < argv.size(); ++i) {
    const std::string& t = argv[i];
    auto next = [&]() { return i + 1 < argv.size() ? argv[++i] : std::string(); };
    if (t == "-X" || t == "--request") {
      method = next();
    } else if (t.rfind("-X", 0) == 0 && t.size() > 2) {
      method = t.substr(2);
    } else if (t == "-H" || t == "--header") {
      next();
    } else if (kCurlDataFlags.count(t)) {
      next();
      has_data = true;
    } else if (kCurlValueFlags.count(t)) {
      next();
    } else if (t == "--url") {
      url = next();
    } else if (t == "--include") {
      include = true;
    } else if (t == "--head") {
      head = true;
    } else if (t == "--fail") {
      fail = true;
    } else if (t.size() > 1 && t[0] == '-' && t[1] != '-') {
      for (char c : t.substr(1)) {
        if (c == 'i') include = true;
        if (c == 'I') head = true;
        if (c == 'f') fail = true;
      }
    } else if (t.rfind("--", 0) != 0) {
      url = t;
    }
  }
  if (url.empty()) return result(2, "", "curl: no URL specified\n");
  auto parsed = scan::parse_http_url(url);
  if (!parsed) return result(3, "", "curl: (3) URL using bad/illegal format or missing URL\n");
  if (method.empty()) method = head ? "HEAD" : has_data ? "POST" : "GET";

  const HostFixture* host = fx.find_host(parsed->host);
  bool listening = host && std::any_of(host->services.begin(), host->services.end(), [&](const auto& s) {
                     return s.port == parsed->port && s.protocol == Protocol::tcp && s.state == PortState::open;
                   });
  if (!listening) {
    return result(7, "", "curl: (7) Failed to connect to " + parsed->host + " port " + std::to_string(parsed->port) +
                             " after 0 ms: Couldn't connect to server\n");
  }

  const HttpRoute* route = find_route(*host, method, parsed->path);
  int status = route ? route->status : 404;
  std::string reason = route && !route->reason.empty() ? route->reason : reason_for(status);
  std::string body = route ? route->body : "<!doctype html><html><head><title>404 Not Found</title></head></html>\n";
  std::vector<std::string> headers = route ? route->headers : std::vector<std::string>{"Content-Type: text/html"};
  if (fail && status >= 400) {
    return result(22, "", "curl: (22) The requested URL returned error: " + std::to_string(status) + "\n");
  }

  std::ostringstream head_text;
  head_text << "HTTP/1.1 " << status << (reason.empty() ? "" : " " + reason) << "\r\n";
  bool has_length = false;
  for (const auto& h : headers) {
    head_text << h << "\r\n";
    if (lower(h).rfind("content-length:", 0) == 0) has_length = true;
  }
  if (!has_length) head_text << "Content-Length: " << body.size() << "\r\n";
  head_text << "\r\n";

  std::string out;
  if (include || head || method == "HEAD") out = head_text.str();
  if (method != "HEAD" && !head) out += body;
  return result(0, std::move(out));
}

}  // namespace

ProcessOutput mock_exec(const ScenarioFixture& fixture, const std::vector<std::string>& argv, std::string_view) {
  if (argv.empty()) return result(127, "", "empty command\n");
  std::string binary = std::filesystem::path(argv[0]).filename().string();
  if (binary == "nmap") return run_nmap(fixture, argv);
  if (binary == "nuclei") return run_nuclei(fixture, argv);
  if (binary == "curl") return run_curl(fixture, argv);
  return result(127, "", binary + ": command not found\n");
}

ProcessOutput MockExecBackend::run(const std::vector<std::string>& argv, std::string_view input,
                                   std::chrono::seconds) {
  {
    std::lock_guard lock(mutex_);
    invocations_.push_back(argv);
  }
  return mock_exec(*fixture_, argv, input);
}

std::vector<std::vector<std::string>> MockExecBackend::invocations() const {
  std::lock_guard lock(mutex_);
  return invocations_;
}

}  // namespace pentestmcp::mock
