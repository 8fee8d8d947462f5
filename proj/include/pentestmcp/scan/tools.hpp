// The nmap, curl and nuclei MCP tools and their server registries.
#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pentestmcp/mcp/server.hpp"
#include "pentestmcp/scan/exec_backend.hpp"
#include "pentestmcp/scan/target.hpp"

namespace pentestmcp::scan {

inline constexpr std::chrono::seconds kNmapTimeout{600};
inline constexpr std::chrono::seconds kNucleiTimeout{600};
inline constexpr std::chrono::seconds kCurlTimeout{30};

inline constexpr const char* kServerVersion = "0.1.0";

std::vector<std::string> nmap_argv(const TargetSpec& target, const std::vector<std::string>& options);

mcp::ToolCallResult nmap_scan(ExecBackend& backend, const std::string& target, const std::string& options,
                              std::chrono::seconds timeout = kNmapTimeout);

struct CurlRequest {
  std::string url;
  std::string method = "GET";
  std::vector<std::string> headers;
  std::optional<std::string> body;
  std::string options;
};

/// argv for a validated request. The body, when present, is streamed on
/// stdin (--data-binary @-).
std::vector<std::string> curl_argv(const CurlRequest& request, const std::vector<std::string>& options,
                                   std::chrono::seconds timeout);

mcp::ToolCallResult curl_request(ExecBackend& backend, const CurlRequest& request,
                                 std::chrono::seconds timeout = kCurlTimeout);

struct NucleiFilters {
  std::optional<std::string> severity;   // comma list of severities
  std::optional<std::string> templates;  // comma list of template ids
};

std::vector<std::string> nuclei_argv(const TargetSpec& target, const NucleiFilters& filters);

mcp::ToolCallResult nuclei_scan(ExecBackend& backend, const std::string& target, const NucleiFilters& filters,
                                std::chrono::seconds timeout = kNucleiTimeout);

mcp::ToolDescriptor nmap_scan_descriptor();
mcp::ToolDescriptor curl_request_descriptor();
mcp::ToolDescriptor nuclei_scan_descriptor();

mcp::ToolServer make_nmap_server(std::shared_ptr<ExecBackend> backend, std::chrono::seconds timeout = kNmapTimeout);
mcp::ToolServer make_curl_server(std::shared_ptr<ExecBackend> backend, std::chrono::seconds timeout = kCurlTimeout);
mcp::ToolServer make_nuclei_server(std::shared_ptr<ExecBackend> backend,
                                   std::chrono::seconds timeout = kNucleiTimeout);

}  // namespace pentestmcp::scan
