// JSON-RPC 2.0 message model for the MCP stdio transport.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace pentestmcp::mcp {

using json = nlohmann::json;

namespace error_code {
inline constexpr int kParseError = -32700;
inline constexpr int kInvalidRequest = -32600;
inline constexpr int kMethodNotFound = -32601;
inline constexpr int kInvalidParams = -32602;
inline constexpr int kInternalError = -32603;
}  // namespace error_code

struct ErrorObject {
  int code = error_code::kInternalError;
  std::string message;
  std::optional<json> data;

  friend bool operator==(const ErrorObject&, const ErrorObject&) = default;
};

enum class MessageKind { request, response, notification };

/// One JSON-RPC 2.0 message. `id` is null for notifications and for
/// responses to requests whose id could not be recovered.
struct RpcMessage {
  MessageKind kind = MessageKind::request;
  json id;
  std::string method;
  json params;
  std::optional<json> result;
  std::optional<ErrorObject> error;

  static RpcMessage request(json id, std::string method, json params = json::object());
  static RpcMessage notification(std::string method, json params = json::object());
  static RpcMessage success(json id, json result);
  static RpcMessage failure(json id, ErrorObject error);

  friend bool operator==(const RpcMessage&, const RpcMessage&) = default;
};

/// Thrown by decode when the input is not a valid JSON-RPC 2.0 message.
/// `code` is kParseError for bad JSON and kInvalidRequest for bad shape;
/// `id` holds whatever id could be recovered (null otherwise).
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(int code, const std::string& message, json id = nullptr)
      : std::runtime_error(message), code_(code), id_(std::move(id)) {}

  int code() const noexcept { return code_; }
  const json& id() const noexcept { return id_; }

 private:
  int code_;
  json id_;
};

json encode(const RpcMessage& message);
std::string encode_line(const RpcMessage& message);

RpcMessage decode(const json& value);
RpcMessage decode_line(std::string_view line);

}  // namespace pentestmcp::mcp
