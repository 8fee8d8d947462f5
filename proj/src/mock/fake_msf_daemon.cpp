#include "pentestmcp/mock/fake_msf_daemon.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

namespace pentestmcp::mock {

namespace {

using msgpack::Array;
using msgpack::Map;
using msgpack::Value;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string hex(std::uint64_t v, int digits) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf + 16 - digits);
}

bool arg_string(const Array& req, std::size_t i, std::string& out) {
  if (i >= req.size() || !req[i].is_string()) return false;
  out = req[i].as_string();
  return true;
}

std::string option_text(const Value& v) {
  if (v.is_string()) return v.as_string();
  if (v.is_int()) return std::to_string(v.as_int());
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  return msgpack::to_json(v).dump();
}

Value option_default(const OptionSpec& o) {
  if (!o.default_value) return Value();
  const std::string& d = *o.default_value;
  if (o.type == "port" || o.type == "integer") {
    try {
      std::size_t used = 0;
      long long n = std::stoll(d, &used);
      if (used == d.size()) return Value(n);
    } catch (const std::exception&) {
    }
  }
  if (o.type == "bool") return Value(d == "true");
  return Value(d);
}

Value options_map(const std::vector<OptionSpec>& options) {
  Map out;
  for (const auto& o : options) {
    Map spec;
    spec.emplace_back("type", o.type);
    spec.emplace_back("required", o.required);
    spec.emplace_back("advanced", false);
    spec.emplace_back("evasion", false);
    spec.emplace_back("desc", o.description);
    if (o.default_value) spec.emplace_back("default", option_default(o));
    out.emplace_back(o.name, Value(std::move(spec)));
  }
  return Value(std::move(out));
}

std::string ensure_newline(std::string s) {
  if (!s.empty() && s.back() != '\n') s += '\n';
  return s;
}

}  // namespace

Value daemon_error(std::string_view message, int code) {
  return msgpack::make_map({{"error", true},
                            {"error_class", "Msf::RPC::Exception"},
                            {"error_string", message},
                            {"error_message", message},
                            {"error_code", code}});
}

FakeMsfDaemon::FakeMsfDaemon(std::shared_ptr<const ScenarioFixture> fixture) : fixture_(std::move(fixture)) {}

std::string FakeMsfDaemon::handle(std::string_view body) {
  Value request = msgpack::decode(body);
  if (!request.is_array()) return msgpack::encode(daemon_error("request must be an array", 400));
  return msgpack::encode(dispatch(request.as_array()));
}

void FakeMsfDaemon::expire_tokens() { tokens_.clear(); }

std::vector<std::int64_t> FakeMsfDaemon::session_ids() const {
  std::vector<std::int64_t> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

Value FakeMsfDaemon::dispatch(const Array& req) {
  ++calls_;
  std::string method;
  if (!arg_string(req, 0, method)) return daemon_error("missing method name", 400);
  if (method == "auth.login") return login(req);

  std::string token;
  if (!arg_string(req, 1, token) || std::find(tokens_.begin(), tokens_.end(), token) == tokens_.end()) {
    return daemon_error("Invalid Authentication Token", 401);
  }

  std::string a, b;
  if (method == "auth.logout") {
    std::string target = arg_string(req, 2, a) ? a : token;
    tokens_.erase(std::remove(tokens_.begin(), tokens_.end(), target), tokens_.end());
    return msgpack::make_map({{"result", "success"}});
  }
  if (method == "core.version") {
    return msgpack::make_map({{"version", "6.4.0-mock"}, {"ruby", "3.2.0"}, {"api", "1.0"}});
  }
  if (method == "module.search") {
    if (!arg_string(req, 2, a)) return daemon_error("search query required", 400);
    return search(a);
  }
  if (method == "module.info" || method == "module.options") {
    if (!arg_string(req, 2, a) || !arg_string(req, 3, b)) return daemon_error("module type and name required", 400);
    return method == "module.info" ? module_info(a, b) : module_options(a, b);
  }
  if (method == "module.compatible_payloads") {
    if (!arg_string(req, 2, a)) return daemon_error("module name required", 400);
    return compatible_payloads(a);
  }
  if (method == "module.execute") {
    if (!arg_string(req, 2, a) || !arg_string(req, 3, b)) return daemon_error("module type and name required", 400);
    return execute(a, b, req.size() > 4 ? req[4] : Value(Map{}));
  }
  if (method == "session.list") return session_list();
  if (method == "session.stop") {
    if (req.size() < 3 || !req[2].is_int() || !sessions_.erase(req[2].as_int())) {
      return daemon_error("Unknown Session ID", 500);
    }
    return msgpack::make_map({{"result", "success"}});
  }
  if (method == "session.shell_write") return session_write(req, "shell");
  if (method == "session.shell_read") return session_read(req, "shell");
  if (method == "session.meterpreter_write") return session_write(req, "meterpreter");
  if (method == "session.meterpreter_read") return session_read(req, "meterpreter");
  return daemon_error("Unknown API Call: '" + method + "'", 500);
}

Value FakeMsfDaemon::login(const Array& req) {
  std::string user, pass;
  if (!arg_string(req, 1, user) || !arg_string(req, 2, pass)) return daemon_error("Login Failed", 401);
  // Mock mode accepts any credentials.
  const std::uint64_t n = ++token_counter_;
  std::string token = "TEMP" + hex(mix(n), 16) + hex(mix(n ^ 0x5bd1e995), 12);
  tokens_.push_back(token);
  return msgpack::make_map({{"result", "success"}, {"token", token}});
}

Value FakeMsfDaemon::search(std::string_view query) const {
  std::vector<std::string> terms;
  std::istringstream in{std::string(query)};
  for (std::string t; in >> t;) terms.push_back(lower(t));

  Array hits;
  if (terms.empty()) return Value(std::move(hits));
  for (const auto& m : fixture_->msf.modules) {
    std::string haystack = m.fullname + "\n" + m.name;
    for (const auto& [kind, id] : m.references) haystack += "\n" + kind + "-" + id;
    haystack = lower(haystack);
    bool all = std::all_of(terms.begin(), terms.end(), [&](const std::string& t) {
      return haystack.find(t) != std::string::npos;
    });
    if (!all) continue;
    hits.push_back(msgpack::make_map({{"type", m.type},
                                      {"name", m.name},
                                      {"fullname", m.fullname},
                                      {"rank", m.rank},
                                      {"disclosuredate", m.disclosure_date}}));
  }
  return Value(std::move(hits));
}

Value FakeMsfDaemon::module_info(std::string_view type, std::string_view name) const {
  if (type == "payload") {
    const PayloadFixture* p = fixture_->msf.find_payload(name);
    if (!p) return daemon_error("Invalid Module", 500);
    return msgpack::make_map({{"type", "payload"},
                              {"name", p->display_name},
                              {"fullname", "payload/" + p->name},
                              {"rank", "normal"},
                              {"description", p->description},
                              {"references", Array{}}});
  }
  const ModuleFixture* m = fixture_->msf.find_module(type, name);
  if (!m) return daemon_error("Invalid Module", 500);
  Array refs;
  for (const auto& [kind, id] : m->references) refs.push_back(Array{kind, id});
  Map info;
  info.emplace_back("type", m->type);
  info.emplace_back("name", m->name);
  info.emplace_back("fullname", m->fullname);
  info.emplace_back("rank", m->rank);
  info.emplace_back("disclosuredate", m->disclosure_date);
  info.emplace_back("description", m->description);
  info.emplace_back("references", Value(std::move(refs)));
  if (m->default_payload) info.emplace_back("default_payload", *m->default_payload);
  return Value(std::move(info));
}

Value FakeMsfDaemon::module_options(std::string_view type, std::string_view name) const {
  if (type == "payload") {
    const PayloadFixture* p = fixture_->msf.find_payload(name);
    if (!p) return daemon_error("Invalid Module", 500);
    return options_map(p->options);
  }
  const ModuleFixture* m = fixture_->msf.find_module(type, name);
  if (!m) return daemon_error("Invalid Module", 500);
  return options_map(m->options);
}

Value FakeMsfDaemon::compatible_payloads(std::string_view name) const {
  const ModuleFixture* m = fixture_->msf.find_module("exploit", name);
  if (!m) return daemon_error("Invalid Module", 500);
  Array payloads;
  if (auto it = fixture_->msf.payload_compat.find(m->fullname); it != fixture_->msf.payload_compat.end()) {
    for (const auto& p : it->second) payloads.emplace_back(p);
  }
  return msgpack::make_map({{"payloads", Value(std::move(payloads))}});
}

Value FakeMsfDaemon::execute(std::string_view type, std::string_view name, const Value& options) {
  const ModuleFixture* m = fixture_->msf.find_module(type, name);
  if (!m) return daemon_error("Invalid Module", 500);
  if (!options.is_map()) return daemon_error("options must be a map", 400);

  std::map<std::string, std::string> opts;
  for (const auto& [k, v] : options.as_map()) {
    if (k.is_string()) opts[k.as_string()] = option_text(v);
  }
  for (const auto& o : m->options) {
    if (o.default_value && !opts.count(o.name)) opts[o.name] = *o.default_value;
  }
  auto opt = [&](const std::string& key) {
    auto it = opts.find(key);
    return it == opts.end() ? std::string() : it->second;
  };
  std::string payload = opt("PAYLOAD");
  if (payload.empty() && m->default_payload) payload = *m->default_payload;
  if (payload.rfind("payload/", 0) == 0) payload = payload.substr(8);
  std::string rhost = opt("RHOSTS").empty() ? opt("RHOST") : opt("RHOSTS");

  const std::int64_t job = next_job_++;
  const std::string uuid = hex(mix(0xa11ce000ULL + static_cast<std::uint64_t>(job)), 8);
  Value reply = msgpack::make_map({{"job_id", job}, {"uuid", uuid}});

  const auto& compat = fixture_->msf.payload_compat;
  auto allowed = compat.find(m->fullname);
  bool compatible = allowed != compat.end() &&
                    std::find(allowed->second.begin(), allowed->second.end(), payload) != allowed->second.end();
  bool reverse = payload.find("reverse") != std::string::npos;
  std::string session_type = payload_session_type(payload);

  for (const auto& rule : fixture_->msf.exploit_rules) {
    if (rule.module != m->fullname || rule.target_host != rhost) continue;
    if (!compatible || rule.session.type != session_type) continue;
    bool have_required = std::all_of(rule.required_options.begin(), rule.required_options.end(),
                                     [&](const std::string& key) { return !opt(key).empty(); });
    if (!have_required) continue;
    std::string lport = opt("LPORT").empty() ? "4444" : opt("LPORT");
    if (reverse && opt("LHOST") != fixture_->attacker_ip) continue;

    Session s;
    s.type = rule.session.type;
    std::string peer_port = std::to_string(rule.session.peer_port);
    if (reverse) {
      s.tunnel_local = fixture_->attacker_ip + ":" + lport;
      s.tunnel_peer = rhost + ":" + peer_port;
    } else {
      s.tunnel_local = fixture_->attacker_ip + ":" + peer_port;
      s.tunnel_peer = rhost + ":" + lport;
    }
    s.via_exploit = m->fullname;
    s.via_payload = "payload/" + payload;
    s.info = rule.session.info;
    s.session_host = rhost;
    std::string rport = opt("RPORT");
    s.session_port = !rport.empty() && std::all_of(rport.begin(), rport.end(), ::isdigit) && rport.size() < 6
                         ? std::stoi(rport)
                         : 0;
    s.exploit_uuid = uuid;
    sessions_.emplace(next_session_++, std::move(s));
    break;
  }
  return reply;
}

Value FakeMsfDaemon::session_list() const {
  Map out;
  for (const auto& [id, s] : sessions_) {
    out.emplace_back(id, msgpack::make_map({{"type", s.type},
                                             {"tunnel_local", s.tunnel_local},
                                             {"tunnel_peer", s.tunnel_peer},
                                             {"via_exploit", s.via_exploit},
                                             {"via_payload", s.via_payload},
                                             {"desc", s.type == "meterpreter" ? "Meterpreter" : "Command shell"},
                                             {"info", s.info},
                                             {"workspace", "false"},
                                             {"session_host", s.session_host},
                                             {"session_port", s.session_port},
                                             {"target_host", s.session_host},
                                             {"username", "mock"},
                                             {"uuid", hex(mix(static_cast<std::uint64_t>(id)), 8)},
                                             {"exploit_uuid", s.exploit_uuid},
                                             {"routes", ""},
                                             {"arch", ""},
                                             {"platform", ""}}));
  }
  return Value(std::move(out));
}

Value FakeMsfDaemon::session_write(const Array& req, const std::string& channel) {
  if (req.size() < 4 || !req[2].is_int() || !req[3].is_string()) return daemon_error("session id and data required", 400);
  auto it = sessions_.find(req[2].as_int());
  if (it == sessions_.end()) return daemon_error("Unknown Session ID " + std::to_string(req[2].as_int()), 500);
  const std::string& data = req[3].as_string();
  channel_log_.push_back({it->first, channel, "session." + channel + "_write", data});
  Session& s = it->second;
  if (s.type != channel) {
    return daemon_error("Session " + std::to_string(it->first) + " is not a " + channel + " session", 500);
  }

  std::string command = trim(data);
  if (!command.empty()) {
    const auto& table = fixture_->msf.session_commands;
    auto by_type = table.find(s.type);
    const std::string* canned = nullptr;
    if (by_type != table.end()) {
      if (auto hit = by_type->second.find(command); hit != by_type->second.end()) canned = &hit->second;
    }
    if (canned) {
      s.pending += ensure_newline(*canned);
    } else if (s.type == "meterpreter") {
      s.pending += "[-] Unknown command: " + command + "\n";
    } else {
      s.pending += "sh: 1: " + command.substr(0, command.find(' ')) + ": not found\n";
    }
  }
  if (channel == "shell") return msgpack::make_map({{"write_count", std::to_string(data.size())}});
  return msgpack::make_map({{"result", "success"}});
}

Value FakeMsfDaemon::session_read(const Array& req, const std::string& channel) {
  if (req.size() < 3 || !req[2].is_int()) return daemon_error("session id required", 400);
  auto it = sessions_.find(req[2].as_int());
  if (it == sessions_.end()) return daemon_error("Unknown Session ID " + std::to_string(req[2].as_int()), 500);
  Session& s = it->second;
  channel_log_.push_back({it->first, channel, "session." + channel + "_read", s.type == channel ? s.pending : ""});
  if (s.type != channel) {
    return daemon_error("Session " + std::to_string(it->first) + " is not a " + channel + " session", 500);
  }
  std::string data = std::move(s.pending);
  s.pending.clear();
  if (channel == "shell") return msgpack::make_map({{"seq", 0}, {"data", data}});
  return msgpack::make_map({{"data", data}});
}

std::string FakeDaemonTransport::post(std::string_view body) {
  try {
    return daemon_->handle(body);
  } catch (const msgpack::DecodeError& e) {
    throw msf::MsfError(msf::MsfError::Kind::transport, std::string("RPC transport failure: ") + e.what());
  }
}

}  // namespace pentestmcp::mock
