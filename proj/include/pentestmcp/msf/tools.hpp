// The seven metasploit MCP tools, implemented over RpcClient.
#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>

#include "pentestmcp/mcp/server.hpp"
#include "pentestmcp/msf/rpc.hpp"

namespace pentestmcp::msf {

struct MsfToolConfig {
  std::chrono::milliseconds session_wait{30'000};
  std::chrono::milliseconds session_poll{1'000};
  std::chrono::milliseconds read_poll{500};
  std::function<std::chrono::steady_clock::time_point()> now = [] { return std::chrono::steady_clock::now(); };
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to std::this_thread::sleep_for
};

/// Strips a leading "<type>/" from a module path ("exploit/multi/x" ->
/// "multi/x").
std::string strip_module_type(const std::string& module, const std::string& type);

/// Exploit options after merging: module options, then PAYLOAD, then
/// payload options, later entries overriding earlier ones. Values are
/// stringified; order is first-insertion.
msgpack::Map merge_exploit_options(const mcp::json& module_options, const std::string& payload,
                                   const mcp::json& payload_options);

class MsfTools {
 public:
  MsfTools(std::shared_ptr<RpcClient> client, MsfToolConfig config = {});

  mcp::ToolCallResult search(const std::string& query);
  mcp::ToolCallResult info(const std::string& module_name, const std::string& module_type);
  mcp::ToolCallResult module_payloads(const std::string& module);
  mcp::ToolCallResult payload_info(const std::string& payload);
  mcp::ToolCallResult exploit(const std::string& module, const mcp::json& module_options, const std::string& payload,
                              const mcp::json& payload_options);
  mcp::ToolCallResult sessions();
  mcp::ToolCallResult session_interact(std::int64_t session_id, const std::string& command, double timeout_secs);

 private:
  void pause(std::chrono::milliseconds d) const;

  std::shared_ptr<RpcClient> client_;
  MsfToolConfig config_;
};

inline constexpr const char* kPayloadInfoAlias = "metasploit_module_payload_info";

std::vector<mcp::ToolDescriptor> metasploit_descriptors();

/// Registers the seven tools plus the payload-info alias.
mcp::ToolServer make_metasploit_server(std::shared_ptr<RpcClient> client, MsfToolConfig config = {});

}  // namespace pentestmcp::msf
