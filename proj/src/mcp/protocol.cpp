#include "pentestmcp/mcp/protocol.hpp"

namespace pentestmcp::mcp {

namespace {

constexpr const char* kVersion = "2.0";

bool valid_request_id(const json& id) { return id.is_number_integer() || id.is_string(); }

json encode_error(const ErrorObject& error) {
  json out = {{"code", error.code}, {"message", error.message}};
  if (error.data) out["data"] = *error.data;
  return out;
}

ErrorObject decode_error(const json& value, const json& id) {
  if (!value.is_object() || !value.contains("code") || !value["code"].is_number_integer() ||
      !value.contains("message") || !value["message"].is_string()) {
    throw ProtocolError(error_code::kInvalidRequest, "malformed error object", id);
  }
  ErrorObject error;
  error.code = value["code"].get<int>();
  error.message = value["message"].get<std::string>();
  if (value.contains("data")) error.data = value["data"];
  return error;
}

}  // namespace

RpcMessage RpcMessage::request(json id, std::string method, json params) {
  RpcMessage m;
  m.kind = MessageKind::request;
  m.id = std::move(id);
  m.method = std::move(method);
  m.params = std::move(params);
  return m;
}

RpcMessage RpcMessage::notification(std::string method, json params) {
  RpcMessage m;
  m.kind = MessageKind::notification;
  m.method = std::move(method);
  m.params = std::move(params);
  return m;
}

RpcMessage RpcMessage::success(json id, json result) {
  RpcMessage m;
  m.kind = MessageKind::response;
  m.id = std::move(id);
  m.result = std::move(result);
  return m;
}

RpcMessage RpcMessage::failure(json id, ErrorObject error) {
  RpcMessage m;
  m.kind = MessageKind::response;
  m.id = std::move(id);
  m.error = std::move(error);
  return m;
}

json encode(const RpcMessage& message) {
  json out = {{"jsonrpc", kVersion}};
  switch (message.kind) {
    case MessageKind::request:
      out["id"] = message.id;
      out["method"] = message.method;
      if (!message.params.is_null()) out["params"] = message.params;
      break;
    case MessageKind::notification:
      out["method"] = message.method;
      if (!message.params.is_null()) out["params"] = message.params;
      break;
    case MessageKind::response:
      out["id"] = message.id;
      if (message.error) {
        out["error"] = encode_error(*message.error);
      } else {
        out["result"] = message.result.value_or(json::object());
      }
      break;
  }
  return out;
}

std::string encode_line(const RpcMessage& message) {
  // dump() escapes embedded newlines, so one message is always one line.
  return encode(message).dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

RpcMessage decode(const json& value) {
  if (!value.is_object()) {
    throw ProtocolError(error_code::kInvalidRequest, "message must be a JSON object");
  }
  json id = value.contains("id") ? value["id"] : json(nullptr);
  auto version = value.find("jsonrpc");
  if (version == value.end() || *version != kVersion) {
    throw ProtocolError(error_code::kInvalidRequest, "jsonrpc must be \"2.0\"", id);
  }

  const bool has_method = value.contains("method");
  const bool has_result = value.contains("result");
  const bool has_error = value.contains("error");

  if (has_method) {
    if (!value["method"].is_string()) {
      throw ProtocolError(error_code::kInvalidRequest, "method must be a string", id);
    }
    if (has_result || has_error) {
      throw ProtocolError(error_code::kInvalidRequest, "request carries result or error", id);
    }
    RpcMessage m;
    m.method = value["method"].get<std::string>();
    m.params = value.contains("params") ? value["params"] : json(nullptr);
    if (!m.params.is_null() && !m.params.is_object() && !m.params.is_array()) {
      throw ProtocolError(error_code::kInvalidRequest, "params must be structured", id);
    }
    if (value.contains("id")) {
      if (!valid_request_id(id)) {
        throw ProtocolError(error_code::kInvalidRequest, "id must be an integer or string");
      }
      m.kind = MessageKind::request;
      m.id = id;
    } else {
      m.kind = MessageKind::notification;
    }
    return m;
  }

  if (has_result == has_error) {
    throw ProtocolError(error_code::kInvalidRequest,
                        "response must carry exactly one of result or error", id);
  }
  if (!value.contains("id") || !(id.is_null() || valid_request_id(id))) {
    throw ProtocolError(error_code::kInvalidRequest, "response id missing or invalid");
  }
  if (has_result) return RpcMessage::success(id, value["result"]);
  return RpcMessage::failure(id, decode_error(value["error"], id));
}

RpcMessage decode_line(std::string_view line) {
  json value = json::parse(line.begin(), line.end(), nullptr, false);
  if (value.is_discarded()) {
    throw ProtocolError(error_code::kParseError, "parse error");
  }
  return decode(value);
}

}  // namespace pentestmcp::mcp
