#include "pentestmcp/orchestrator/client.hpp"

#include <algorithm>

#include "pentestmcp/mcp/protocol.hpp"

namespace pentestmcp::orchestrator {

namespace {

using mcp::json;

constexpr std::chrono::milliseconds kHandshakeTimeout{30'000};

ChildProcess spawn_child(const std::string& name, const std::vector<std::string>& argv) {
  try {
    return ChildProcess(argv);
  } catch (const SpawnError& e) {
    throw StartupError(name, e.what());
  }
}

}  // namespace

McpClient::McpClient(std::string name, const std::vector<std::string>& argv, std::chrono::milliseconds timeout)
    : name_(std::move(name)), child_(spawn_child(name_, argv)), timeout_(timeout) {
  const auto saved = timeout_;
  timeout_ = std::min(timeout_, kHandshakeTimeout);
  try {
    json init = request("initialize", {{"protocolVersion", mcp::kLatestProtocolVersion},
                                       {"capabilities", json::object()},
                                       {"clientInfo", {{"name", "pentestmcp-run"}, {"version", "0.1.0"}}}});
    server_info_ = init.value("serverInfo", json::object());
    if (!child_.write_all(mcp::encode_line(mcp::RpcMessage::notification("notifications/initialized")))) {
      throw McpError("server closed its input");
    }
    json listed = request("tools/list", json::object());
    if (!listed.contains("tools") || !listed["tools"].is_array()) throw McpError("tools/list returned no tools array");
    tools_ = listed["tools"];
  } catch (const McpError& e) {
    throw StartupError(name_, e.what());
  }
  timeout_ = saved;
}

std::vector<std::string> McpClient::tool_names() const {
  std::vector<std::string> names;
  for (const auto& t : tools_) names.push_back(t.value("name", ""));
  return names;
}

json McpClient::request(const std::string& method, json params) {
  const std::int64_t id = next_id_++;
  if (!child_.write_all(mcp::encode_line(mcp::RpcMessage::request(id, method, std::move(params))))) {
    throw McpError("server '" + name_ + "' is not accepting input");
  }
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  while (true) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) throw McpError("server '" + name_ + "' did not answer " + method + " in time");
    auto line = child_.read_line(remaining);
    if (!line) {
      if (std::chrono::steady_clock::now() >= deadline) {
        throw McpError("server '" + name_ + "' did not answer " + method + " in time");
      }
      throw McpError("server '" + name_ + "' exited during " + method);
    }
    if (line->find_first_not_of(" \t\r") == std::string::npos) continue;
    mcp::RpcMessage message;
    try {
      message = mcp::decode_line(*line);
    } catch (const mcp::ProtocolError& e) {
      throw McpError("server '" + name_ + "' sent an undecodable message: " + e.what());
    }
    if (message.kind != mcp::MessageKind::response || message.id != json(id)) continue;
    if (message.error) throw McpRemoteError(message.error->code, message.error->message);
    return message.result.value_or(json::object());
  }
}

mcp::ToolCallResult McpClient::call_tool(const std::string& tool, const json& arguments) {
  json result = request("tools/call", {{"name", tool}, {"arguments", arguments}});
  try {
    return mcp::ToolCallResult::from_json(result);
  } catch (const std::exception& e) {
    throw McpError("server '" + name_ + "' returned a malformed tool result: " + e.what());
  }
}

ServerHandles spawn_servers(const ServerConfig& config, std::chrono::milliseconds timeout) {
  ServerHandles handles;
  for (const auto& [name, argv] : config) handles.emplace(name, std::make_unique<McpClient>(name, argv, timeout));
  return handles;
}

}  // namespace pentestmcp::orchestrator
