// nmap result model, XML parsing/generation and agent-facing rendering.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pentestmcp::scan {

enum class Protocol { tcp, udp };
enum class PortState { open, closed, filtered };

std::string_view to_string(Protocol protocol);
std::string_view to_string(PortState state);

struct ServiceRecord {
  int port = 0;
  Protocol protocol = Protocol::tcp;
  PortState state = PortState::open;
  std::string service;
  std::string product;
  std::string version;
  std::string extrainfo;

  /// "product version (extrainfo)" with empty parts dropped.
  std::string version_column() const;

  friend bool operator==(const ServiceRecord&, const ServiceRecord&) = default;
};

/// NSE script output. port == 0 marks a host-level script.
struct ScriptResult {
  std::string id;
  std::string output;
  int port = 0;
  Protocol protocol = Protocol::tcp;

  friend bool operator==(const ScriptResult&, const ScriptResult&) = default;
};

/// Results for one scanned host. services are sorted by (port, protocol)
/// with no duplicates.
struct ScanReport {
  std::string target;
  std::string hostname;
  std::vector<ServiceRecord> services;
  std::optional<std::string> os_guess;
  std::vector<ScriptResult> script_results;

  friend bool operator==(const ScanReport&, const ScanReport&) = default;
};

/// A whole nmap invocation: only hosts that were up are listed.
struct NmapRun {
  std::string args;
  std::vector<ScanReport> hosts;
  int hosts_up = 0;
  int hosts_total = 0;

  friend bool operator==(const NmapRun&, const NmapRun&) = default;
};

class NmapFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws xml::ParseError (with byte offset) for malformed XML and
/// NmapFormatError for well-formed documents that are not nmap output.
NmapRun parse_nmap_xml(std::string_view xml);

/// Emits the subset of nmap's -oX format that parse_nmap_xml reads.
std::string render_nmap_xml(const NmapRun& run);

/// Human/agent-facing listing modeled on nmap's normal output.
std::string render_nmap_text(const NmapRun& run);

nlohmann::json to_json(const NmapRun& run);

/// Sorts by (port, protocol) and drops later duplicates.
void normalize_services(std::vector<ServiceRecord>& services);

}  // namespace pentestmcp::scan
