#include "pentestmcp/msf/tools.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <thread>

namespace pentestmcp::msf {

namespace {

using mcp::json;
using mcp::PropertyType;
using mcp::ToolCallResult;
using msgpack::Value;

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number() || v.is_null()) return v.dump();
  throw std::invalid_argument("option values must be scalars");
}

void upsert(msgpack::Map& map, const std::string& key, std::string value) {
  for (auto& [k, v] : map) {
    if (k.as_string() == key) {
      v = Value(std::move(value));
      return;
    }
  }
  map.emplace_back(Value(key), Value(std::move(value)));
}

std::string value_text(const Value& v) {
  if (v.is_string()) return v.as_string();
  if (v.is_nil()) return "";
  return msgpack::to_json(v).dump();
}

std::string render_option_table(const Value& options) {
  if (!options.is_map() || options.as_map().empty()) return "  (none)\n";
  std::ostringstream out;
  for (const auto& [name, spec] : options.as_map()) {
    if (const Value* adv = spec.find("advanced"); adv && adv->is_bool() && adv->as_bool()) continue;
    if (const Value* ev = spec.find("evasion"); ev && ev->is_bool() && ev->as_bool()) continue;
    const Value* req = spec.find("required");
    bool required = req && req->is_bool() && req->as_bool();
    out << "  " << value_text(name) << " (" << spec.get_string("type", "string") << ", "
        << (required ? "required" : "optional");
    if (const Value* def = spec.find("default"); def && !def->is_nil()) out << ", default: " << value_text(*def);
    out << "): " << spec.get_string("desc") << '\n';
  }
  return out.str();
}

std::vector<std::string> option_names(const Value& options) {
  std::vector<std::string> names;
  if (!options.is_map()) return names;
  for (const auto& [name, spec] : options.as_map()) {
    if (const Value* adv = spec.find("advanced"); adv && adv->is_bool() && adv->as_bool()) continue;
    if (const Value* ev = spec.find("evasion"); ev && ev->is_bool() && ev->as_bool()) continue;
    names.push_back(value_text(name));
  }
  return names;
}

std::string render_references(const Value& refs) {
  std::ostringstream out;
  if (!refs.is_array()) return out.str();
  for (const auto& ref : refs.as_array()) {
    if (ref.is_array() && ref.as_array().size() == 2) {
      const auto& pair = ref.as_array();
      std::string kind = value_text(pair[0]);
      std::string id = value_text(pair[1]);
      out << "  " << (kind == "CVE" ? "CVE-" + id : kind + ": " + id) << '\n';
    } else {
      out << "  " << value_text(ref) << '\n';
    }
  }
  return out.str();
}

std::string session_key(const Value& key) {
  if (key.is_int()) return std::to_string(key.as_int());
  return value_text(key);
}

std::string session_label(const std::string& type) {
  return type == "meterpreter" ? "Meterpreter" : "Command shell";
}

std::string rpc_failure(const MsfError& e) {
  return std::string(e.what()) + (e.retriable() ? " (transport error, retry later)" : "");
}

}  // namespace

std::string strip_module_type(const std::string& module, const std::string& type) {
  std::string prefix = type + "/";
  if (module.rfind(prefix, 0) == 0) return module.substr(prefix.size());
  return module;
}

msgpack::Map merge_exploit_options(const json& module_options, const std::string& payload,
                                   const json& payload_options) {
  msgpack::Map merged;
  for (const auto& [k, v] : module_options.items()) upsert(merged, k, scalar_text(v));
  upsert(merged, "PAYLOAD", payload);
  for (const auto& [k, v] : payload_options.items()) upsert(merged, k, scalar_text(v));
  return merged;
}

MsfTools::MsfTools(std::shared_ptr<RpcClient> client, MsfToolConfig config)
    : client_(std::move(client)), config_(std::move(config)) {
  if (!config_.now) config_.now = [] { return std::chrono::steady_clock::now(); };
}

void MsfTools::pause(std::chrono::milliseconds d) const {
  if (config_.sleep) {
    config_.sleep(d);
  } else {
    std::this_thread::sleep_for(d);
  }
}

ToolCallResult MsfTools::search(const std::string& query) {
  if (query.find_first_not_of(" \t") == std::string::npos) return ToolCallResult::error("query must be non-empty");
  try {
    Value hits = client_->call("module.search", {query});
    if (!hits.is_array() || hits.as_array().empty()) return ToolCallResult::ok("no modules found");
    std::string out;
    json structured = json::array();
    for (const auto& hit : hits.as_array()) {
      nlohmann::ordered_json line;
      line["type"] = hit.get_string("type");
      line["name"] = hit.get_string("name");
      line["rank"] = hit.get_string("rank");
      line["disclosuredate"] = hit.get_string("disclosuredate");
      line["fullname"] = hit.get_string("fullname");
      out += line.dump() + "\n";
      structured.push_back(json::parse(line.dump()));
    }
    out.pop_back();
    return ToolCallResult::ok(out, json{{"modules", structured}});
  } catch (const MsfError& e) {
    return ToolCallResult::error(rpc_failure(e));
  }
}

ToolCallResult MsfTools::info(const std::string& module_name, const std::string& module_type) {
  std::string name = strip_module_type(module_name, module_type);
  try {
    Value info = client_->call("module.info", {module_type, name});
    Value options = client_->call("module.options", {module_type, name});
    std::ostringstream out;
    out << "Name: " << info.get_string("name") << '\n';
    out << "Module: " << module_type << '/' << name << '\n';
    if (auto rank = info.get_string("rank"); !rank.empty()) out << "Rank: " << rank << '\n';
    if (auto date = info.get_string("disclosuredate"); !date.empty()) out << "Disclosed: " << date << '\n';
    if (auto def = info.get_string("default_payload"); !def.empty()) out << "Default payload: " << def << '\n';
    out << "\nDescription:\n" << info.get_string("description") << '\n';
    if (const Value* refs = info.find("references"); refs && refs->is_array() && !refs->as_array().empty()) {
      out << "\nReferences:\n" << render_references(*refs);
    }
    out << "\nOptions:\n" << render_option_table(options);
    std::string text = out.str();
    text.pop_back();
    return ToolCallResult::ok(text);
  } catch (const MsfError& e) {
    if (e.kind() == MsfError::Kind::daemon) return ToolCallResult::error("module not found: " + module_type + "/" + name);
    return ToolCallResult::error(rpc_failure(e));
  }
}

ToolCallResult MsfTools::module_payloads(const std::string& module) {
  std::string name = strip_module_type(module, "exploit");
  try {
    Value response = client_->call("module.compatible_payloads", {name});
    const Value* payloads = response.find("payloads");
    if (!payloads || !payloads->is_array()) return ToolCallResult::error("module not found: " + name);
    std::string out;
    for (const auto& p : payloads->as_array()) out += value_text(p) + "\n";
    if (out.empty()) return ToolCallResult::ok("no compatible payloads");
    out.pop_back();
    return ToolCallResult::ok(out);
  } catch (const MsfError& e) {
    if (e.kind() == MsfError::Kind::daemon) return ToolCallResult::error("module not found: " + name);
    return ToolCallResult::error(rpc_failure(e));
  }
}

ToolCallResult MsfTools::payload_info(const std::string& payload) {
  std::string name = strip_module_type(payload, "payload");
  try {
    Value info = client_->call("module.info", {"payload", name});
    Value options = client_->call("module.options", {"payload", name});
    std::ostringstream out;
    out << "Name: " << info.get_string("name") << '\n';
    out << "Payload: " << name << '\n';
    out << "Description: " << info.get_string("description") << '\n';
    auto names = option_names(options);
    out << "Options: ";
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << "\n\nOption details:\n" << render_option_table(options);
    std::string text = out.str();
    text.pop_back();
    return ToolCallResult::ok(text);
  } catch (const MsfError& e) {
    if (e.kind() == MsfError::Kind::daemon) return ToolCallResult::error("payload not found: " + name);
    return ToolCallResult::error(rpc_failure(e));
  }
}

ToolCallResult MsfTools::exploit(const std::string& module, const json& module_options, const std::string& payload,
                                 const json& payload_options) {
  std::string name = strip_module_type(module, "exploit");
  msgpack::Map merged;
  try {
    merged = merge_exploit_options(module_options, strip_module_type(payload, "payload"), payload_options);
  } catch (const std::invalid_argument& e) {
    return ToolCallResult::error(e.what());
  }

  std::ostringstream log;
  try {
    Value info = client_->call("module.info", {"exploit", name});
    if (auto def = info.get_string("default_payload"); !def.empty()) {
      log << "[*] No payload configured, defaulting to " << def << '\n';
    }
  } catch (const MsfError& e) {
    if (e.kind() == MsfError::Kind::daemon) return ToolCallResult::error("module not found: exploit/" + name);
    return ToolCallResult::error(rpc_failure(e));
  }

  std::string lhost, lport;
  for (const auto& [k, v] : merged) {
    const std::string& key = k.as_string();
    log << (key == "PAYLOAD" ? "payload" : key) << " = " << v.as_string() << '\n';
    if (key == "LHOST") lhost = v.as_string();
    if (key == "LPORT") lport = v.as_string();
  }

  try {
    std::set<std::string> before;
    if (Value list = client_->call("session.list"); list.is_map()) {
      for (const auto& [id, _] : list.as_map()) before.insert(session_key(id));
    }

    Value job = client_->call("module.execute", {"exploit", name, Value(merged)});
    if (const Value* id = job.find("job_id"); id && !id->is_nil()) {
      log << "[*] Exploit running as background job "
          << (id->is_int() ? std::to_string(id->as_int()) : value_text(*id)) << ".\n";
    }
    std::string job_uuid = job.get_string("uuid");
    std::string payload_name = strip_module_type(payload, "payload");
    if (!lhost.empty() && payload_name.find("reverse") != std::string::npos) {
      log << "[*] Started reverse TCP handler on " << lhost << ':' << (lport.empty() ? "4444" : lport) << '\n';
    }

    const auto deadline = config_.now() + config_.session_wait;
    bool opened = false;
    while (true) {
      Value list = client_->call("session.list");
      if (list.is_map()) {
        for (const auto& [id, s] : list.as_map()) {
          std::string key = session_key(id);
          if (before.count(key)) continue;
          std::string exploit_uuid = s.get_string("exploit_uuid");
          if (!job_uuid.empty() && !exploit_uuid.empty() && exploit_uuid != job_uuid) continue;
          log << "[*] " << session_label(s.get_string("type")) << " session " << key << " opened ("
              << s.get_string("tunnel_local") << " -> " << s.get_string("tunnel_peer") << ")\n";
          opened = true;
        }
      }
      if (opened || config_.now() >= deadline) break;
      pause(config_.session_poll);
    }
    if (!opened) log << "[*] Exploit completed, but no session was created.\n";
  } catch (const MsfError& e) {
    log << "[-] Exploit failed: " << e.what() << '\n';
    std::string text = log.str();
    text.pop_back();
    return ToolCallResult::error(text);
  }
  std::string text = log.str();
  text.pop_back();
  return ToolCallResult::ok(text);
}

ToolCallResult MsfTools::sessions() {
  try {
    Value list = client_->call("session.list");
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    if (list.is_map()) {
      for (const auto& [id, s] : list.as_map()) {
        nlohmann::ordered_json entry;
        entry["type"] = s.get_string("type");
        entry["tunnel_local"] = s.get_string("tunnel_local");
        entry["tunnel_peer"] = s.get_string("tunnel_peer");
        entry["via_exploit"] = s.get_string("via_exploit");
        entry["via_payload"] = s.get_string("via_payload");
        entry["info"] = s.get_string("info");
        entry["session_host"] = s.get_string("session_host");
        out[session_key(id)] = std::move(entry);
      }
    }
    return ToolCallResult::ok(out.dump(), json::parse(out.dump()));
  } catch (const MsfError& e) {
    return ToolCallResult::error(rpc_failure(e));
  }
}

ToolCallResult MsfTools::session_interact(std::int64_t session_id, const std::string& command, double timeout_secs) {
  try {
    Value list = client_->call("session.list");
    const Value* session = nullptr;
    if (list.is_map()) {
      for (const auto& [id, s] : list.as_map()) {
        if (session_key(id) == std::to_string(session_id)) session = &s;
      }
    }
    if (!session) return ToolCallResult::error("session not found: " + std::to_string(session_id));

    const bool meterpreter = session->get_string("type") == "meterpreter";
    const char* write_method = meterpreter ? "session.meterpreter_write" : "session.shell_write";
    const char* read_method = meterpreter ? "session.meterpreter_read" : "session.shell_read";

    client_->call(write_method, {session_id, meterpreter ? command : command + "\n"});

    auto timeout = std::chrono::milliseconds(static_cast<long long>(std::max(0.0, timeout_secs) * 1000));
    const auto deadline = config_.now() + timeout;
    std::string output;
    while (true) {
      Value chunk = client_->call(read_method, {session_id});
      std::string data = chunk.get_string("data");
      if (!data.empty()) {
        output += data;
      } else if (!output.empty()) {
        break;  // quiet for a full poll interval
      }
      if (config_.now() >= deadline) break;
      pause(config_.read_poll);
    }
    if (output.empty()) return ToolCallResult::error("no output before timeout");
    return ToolCallResult::ok(output);
  } catch (const MsfError& e) {
    return ToolCallResult::error(rpc_failure(e));
  }
}

std::vector<mcp::ToolDescriptor> metasploit_descriptors() {
  return {
      {"metasploit_search",
       "Search Metasploit modules by keyword, CVE id or module path fragment. Parameter: query. Returns one "
       "JSON object per matching module with type, name, rank, disclosuredate and fullname, or 'no modules "
       "found'.",
       {{{"query", PropertyType::string, "Search terms, e.g. 'struts CVE-2017-5638'", true}}}},
      {"metasploit_info",
       "Show details about a Metasploit module. Parameters: module_name (path without type prefix, e.g. "
       "'multi/http/struts2_content_type_ognl') and module_type (exploit, auxiliary, post or payload). "
       "Returns the description, references and the module's options with required flags and defaults.",
       {{{"module_name", PropertyType::string, "Module path", true},
         {"module_type", PropertyType::string, "Module type, e.g. exploit", true}}}},
      {"metasploit_module_payloads",
       "List the payloads compatible with an exploit module. Parameter: module (exploit path). Returns one "
       "payload name per line.",
       {{{"module", PropertyType::string, "Exploit module path", true}}}},
      {"metasploit_payload_info",
       "Show details about a payload. Parameter: payload (e.g. 'cmd/unix/reverse_bash'). Returns the "
       "description and an 'Options:' list (such as LHOST,LPORT) followed by option details.",
       {{{"payload", PropertyType::string, "Payload path", true}}}},
      {"metasploit_exploit",
       "Launch an exploit module with a payload. Parameters (all required): module (exploit path), "
       "module_options (object, e.g. {\"RHOSTS\": \"10.0.0.5\", \"RPORT\": \"80\"}), payload (payload path) "
       "and payload_options (object, e.g. {\"LHOST\": \"10.0.0.2\", \"LPORT\": \"4444\"}). Payload options "
       "override module options with the same name. Waits for a session and returns the execution log, "
       "including a 'session N opened' line on success.",
       {{{"module", PropertyType::string, "Exploit module path", true},
         {"module_options", PropertyType::object, "Module datastore options", true},
         {"payload", PropertyType::string, "Payload path", true},
         {"payload_options", PropertyType::object, "Payload datastore options", true}}}},
      {"metasploit_sessions",
       "List active Metasploit sessions. No parameters. Returns a JSON map from session id to type (shell "
       "or meterpreter), tunnel_local, tunnel_peer, via_exploit, via_payload, info and session_host.",
       {}},
      {"metasploit_session_interact",
       "Run a command in an open session. Parameters: session_id (integer), command (shell command, or "
       "meterpreter command such as getuid/sysinfo/hashdump) and timeout (seconds to wait for output, "
       "default 5). Returns the command output.",
       {{{"session_id", PropertyType::integer, "Session id from metasploit_sessions", true},
         {"command", PropertyType::string, "Command to run", true},
         {"timeout", PropertyType::number, "Seconds to wait for output", false}}}},
  };
}

mcp::ToolServer make_metasploit_server(std::shared_ptr<RpcClient> client, MsfToolConfig config) {
  auto tools = std::make_shared<MsfTools>(std::move(client), std::move(config));
  auto descriptors = metasploit_descriptors();
  auto str = [](const json& args, const char* key) { return args.at(key).get<std::string>(); };

  std::vector<mcp::ToolHandler> handlers = {
      [tools, str](const json& a) { return tools->search(str(a, "query")); },
      [tools, str](const json& a) { return tools->info(str(a, "module_name"), str(a, "module_type")); },
      [tools, str](const json& a) { return tools->module_payloads(str(a, "module")); },
      [tools, str](const json& a) { return tools->payload_info(str(a, "payload")); },
      [tools, str](const json& a) {
        return tools->exploit(str(a, "module"), a.at("module_options"), str(a, "payload"), a.at("payload_options"));
      },
      [tools](const json&) { return tools->sessions(); },
      [tools, str](const json& a) {
        double timeout = a.contains("timeout") ? a["timeout"].get<double>() : 5.0;
        return tools->session_interact(a.at("session_id").get<std::int64_t>(), str(a, "command"), timeout);
      },
  };

  std::vector<mcp::Tool> registry;
  for (std::size_t i = 0; i < descriptors.size(); ++i) registry.push_back({descriptors[i], handlers[i]});
  mcp::ToolServer server({"pentestmcp-metasploit", "0.1.0"}, std::move(registry));
  server.add_alias(kPayloadInfoAlias, "metasploit_payload_info");
  return server;
}

}  // namespace pentestmcp::msf
