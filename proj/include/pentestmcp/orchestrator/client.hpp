// MCP client speaking to a tool server child process over stdio.
#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pentestmcp/mcp/server.hpp"
#include "pentestmcp/process.hpp"

namespace pentestmcp::orchestrator {

/// The connection failed: the child died, went silent or sent garbage.
class McpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The server answered with a JSON-RPC error object.
class McpRemoteError : public McpError {
 public:
  McpRemoteError(int code, const std::string& message)
      : McpError("JSON-RPC error " + std::to_string(code) + ": " + message), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

class StartupError : public std::runtime_error {
 public:
  StartupError(const std::string& server, const std::string& what)
      : std::runtime_error("server '" + server + "' failed to start: " + what), server_(server) {}
  const std::string& server() const noexcept { return server_; }

 private:
  std::string server_;
};

class McpClient {
 public:
  /// Spawns argv, performs the initialize handshake and caches tools/list.
  /// Throws StartupError naming `name` on any failure.
  McpClient(std::string name, const std::vector<std::string>& argv,
            std::chrono::milliseconds timeout = std::chrono::minutes(15));

  const std::string& name() const { return name_; }
  const mcp::json& server_info() const { return server_info_; }
  /// tools/list result entries as sent by the server.
  const mcp::json& tools() const { return tools_; }
  std::vector<std::string> tool_names() const;

  /// Throws McpRemoteError for protocol errors and McpError when the
  /// connection is gone.
  mcp::ToolCallResult call_tool(const std::string& tool, const mcp::json& arguments);

  pid_t pid() const { return child_.pid(); }
  /// Kills the child (used to simulate crashes).
  void kill() { child_.kill(); }

 private:
  mcp::json request(const std::string& method, mcp::json params);

  std::string name_;
  ChildProcess child_;
  std::chrono::milliseconds timeout_;
  std::int64_t next_id_ = 1;
  mcp::json server_info_;
  mcp::json tools_ = mcp::json::array();
};

using ServerConfig = std::map<std::string, std::vector<std::string>>;
using ServerHandles = std::map<std::string, std::unique_ptr<McpClient>>;

/// Starts every configured server; the first failure aborts with a
/// StartupError naming that server.
ServerHandles spawn_servers(const ServerConfig& config,
                            std::chrono::milliseconds timeout = std::chrono::minutes(15));

}  // namespace pentestmcp::orchestrator
