// MCP tool server core: tool descriptors, argument validation, dispatch and
// the stdio request loop shared by every pentestmcp server binary.
#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pentestmcp/mcp/protocol.hpp"

namespace pentestmcp::mcp {

enum class PropertyType { string, integer, number, boolean, object, array };

std::string_view to_string(PropertyType type);

struct PropertySpec {
  std::string name;
  PropertyType type = PropertyType::string;
  std::string description;
  bool required = false;
};

/// Object schema with properties in declaration order. Required properties
/// are reported in that same order.
struct InputSchema {
  std::vector<PropertySpec> properties;

  std::vector<std::string> required() const;
  const PropertySpec* find(std::string_view name) const;
  json to_json() const;
};

struct ToolDescriptor {
  std::string name;
  std::string description;
  InputSchema input_schema;

  json to_json() const;
};

/// Throws std::invalid_argument when a descriptor breaks its invariants
/// (name syntax, empty description, duplicate property names).
void check_descriptor(const ToolDescriptor& descriptor);

inline constexpr std::size_t kMaxResultBytes = 64 * 1024;
inline constexpr std::string_view kTruncatedMarker = "[truncated]";

struct ToolCallResult {
  std::vector<std::string> content;
  bool is_error = false;
  std::optional<json> structured;

  static ToolCallResult ok(std::string text, std::optional<json> structured = std::nullopt);
  static ToolCallResult error(std::string text);

  /// All text blocks joined with newlines.
  std::string text() const;
  json to_json() const;
  static ToolCallResult from_json(const json& value);
};

/// Cuts `text` to at most kMaxResultBytes (on a UTF-8 boundary) and appends
/// the truncation marker. Text within the cap is returned unchanged.
std::string truncate_output(std::string text);

/// Returns the validation failure message, or nullopt when `args` satisfies
/// the schema.
std::optional<std::string> validate_arguments(const InputSchema& schema, const json& args);

using ToolHandler = std::function<ToolCallResult(const json& args)>;

struct Tool {
  ToolDescriptor descriptor;
  ToolHandler handler;
};

struct ServerInfo {
  std::string name;
  std::string version;
};

class UnknownToolError : public std::runtime_error {
 public:
  explicit UnknownToolError(const std::string& name)
      : std::runtime_error("unknown tool: " + name) {}
};

class ToolServer {
 public:
  ToolServer(ServerInfo info, std::vector<Tool> tools);

  /// Registers an extra name for an existing tool. Aliases are callable but
  /// never listed.
  void add_alias(std::string alias, const std::string& canonical);

  const ServerInfo& info() const { return info_; }
  bool initialized() const { return initialized_; }

  const std::vector<ToolDescriptor>& list_tools() const { return descriptors_; }

  /// Validates and dispatches. Throws UnknownToolError for unknown names;
  /// handler exceptions become is_error results.
  ToolCallResult call_tool(std::string_view name, const json& args) const;

  /// Handles one decoded message. Returns nullopt for notifications.
  std::optional<RpcMessage> handle(const RpcMessage& message);

  /// Handles one raw line. Returns the encoded response line (without the
  /// trailing newline), or nullopt when nothing is to be sent.
  std::optional<std::string> handle_line(std::string_view line);

  /// Reads newline-delimited requests until end of input. Returns 0.
  int serve(std::istream& in, std::ostream& out);

 private:
  RpcMessage handle_request(const RpcMessage& request);

  ServerInfo info_;
  std::vector<Tool> tools_;
  std::vector<ToolDescriptor> descriptors_;
  std::map<std::string, std::size_t, std::less<>> index_;
  bool initialized_ = false;
};

inline constexpr std::string_view kLatestProtocolVersion = "2025-06-18";

}  // namespace pentestmcp::mcp
