#include "pentestmcp/mcp/server.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

namespace pentestmcp::mcp {

namespace {

constexpr std::string_view kSupportedVersions[] = {"2024-11-05", "2025-03-26", "2025-06-18"};

bool valid_tool_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

bool matches_type(const json& value, PropertyType type) {
  switch (type) {
    case PropertyType::string:
      return value.is_string();
    case PropertyType::integer:
      if (value.is_number_integer()) return true;
      if (value.is_number_float()) {
        double d = value.get<double>();
        return std::isfinite(d) && std::floor(d) == d;
      }
      return false;
    case PropertyType::number:
      return value.is_number();
    case PropertyType::boolean:
      return value.is_boolean();
    case PropertyType::object:
      return value.is_object();
    case PropertyType::array:
      return value.is_array();
  }
  return false;
}

}  // namespace

std::string_view to_string(PropertyType type) {
  switch (type) {
    case PropertyType::string: return "string";
    case PropertyType::integer: return "integer";
    case PropertyType::number: return "number";
    case PropertyType::boolean: return "boolean";
    case PropertyType::object: return "object";
    case PropertyType::array: return "array";
  }
  return "unknown";
}

std::vector<std::string> InputSchema::required() const {
  std::vector<std::string> out;
  for (const auto& p : properties) {
    if (p.required) out.push_back(p.name);
  }
  return out;
}

const PropertySpec* InputSchema::find(std::string_view name) const {
  auto it = std::find_if(properties.begin(), properties.end(),
                         [&](const PropertySpec& p) { return p.name == name; });
  return it == properties.end() ? nullptr : &*it;
}

json InputSchema::to_json() const {
  json props = json::object();
  for (const auto& p : properties) {
    json entry = {{"type", std::string(mcp::to_string(p.type))}};
    if (!p.description.empty()) entry["description"] = p.description;
    props[p.name] = std::move(entry);
  }
  return {{"type", "object"}, {"properties", std::move(props)}, {"required", required()}};
}

json ToolDescriptor::to_json() const {
  return {{"name", name}, {"description", description}, {"inputSchema", input_schema.to_json()}};
}

void check_descriptor(const ToolDescriptor& descriptor) {
  if (!valid_tool_name(descriptor.name)) {
    throw std::invalid_argument("invalid tool name: '" + descriptor.name + "'");
  }
  if (descriptor.description.empty()) {
    throw std::invalid_argument("tool '" + descriptor.name + "' has no description");
  }
  std::set<std::string, std::less<>> seen;
  for (const auto& p : descriptor.input_schema.properties) {
    if (p.name.empty() || !seen.insert(p.name).second) {
      throw std::invalid_argument("tool '" + descriptor.name + "' has duplicate or empty property '" +
                                  p.name + "'");
    }
  }
}

ToolCallResult ToolCallResult::ok(std::string text, std::optional<json> structured) {
  ToolCallResult r;
  r.content.push_back(std::move(text));
  r.structured = std::move(structured);
  return r;
}

ToolCallResult ToolCallResult::error(std::string text) {
  ToolCallResult r;
  r.content.push_back(std::move(text));
  r.is_error = true;
  return r;
}

std::string ToolCallResult::text() const {
  std::string out;
  for (std::size_t i = 0; i < content.size(); ++i) {
    if (i) out += '\n';
    out += content[i];
  }
  return out;
}

json ToolCallResult::to_json() const {
  json blocks = json::array();
  for (const auto& t : content) blocks.push_back({{"type", "text"}, {"text", t}});
  if (blocks.empty()) blocks.push_back({{"type", "text"}, {"text", ""}});
  json out = {{"content", std::move(blocks)}, {"isError", is_error}};
  if (structured) out["structuredContent"] = *structured;
  return out;
}

ToolCallResult ToolCallResult::from_json(const json& value) {
  ToolCallResult r;
  if (value.contains("content") && value["content"].is_array()) {
    for (const auto& block : value["content"]) {
      if (block.is_object() && block.value("type", "") == "text") {
        r.content.push_back(block.value("text", ""));
      }
    }
  }
  r.is_error = value.value("isError", false);
  if (value.contains("structuredContent")) r.structured = value["structuredContent"];
  return r;
}

std::string truncate_output(std::string text) {
  if (text.size() <= kMaxResultBytes) return text;
  std::size_t cut = kMaxResultBytes;
  // Back off continuation bytes so the cut never splits a code point.
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  text.resize(cut);
  text += '\n';
  text += kTruncatedMarker;
  return text;
}

std::optional<std::string> validate_arguments(const InputSchema& schema, const json& args) {
  if (!args.is_null() && !args.is_object()) {
    return std::string("Input validation error: arguments must be an object");
  }
  for (const auto& p : schema.properties) {
    if (p.required && (args.is_null() || !args.contains(p.name))) {
      return "Input validation error: '" + p.name + "' is a required property";
    }
  }
  if (args.is_null()) return std::nullopt;
  for (const auto& p : schema.properties) {
    auto it = args.find(p.name);
    if (it != args.end() && !matches_type(*it, p.type)) {
      return "Input validation error: '" + p.name + "' is not of type '" +
             std::string(mcp::to_string(p.type)) + "'";
    }
  }
  return std::nullopt;
}

ToolServer::ToolServer(ServerInfo info, std::vector<Tool> tools)
    : info_(std::move(info)), tools_(std::move(tools)) {
  if (tools_.empty()) throw std::invalid_argument("tool registry is empty");
  for (std::size_t i = 0; i < tools_.size(); ++i) {
    const auto& d = tools_[i].descriptor;
    check_descriptor(d);
    if (!tools_[i].handler) throw std::invalid_argument("tool '" + d.name + "' has no handler");
    if (!index_.emplace(d.name, i).second) {
      throw std::invalid_argument("duplicate tool name: '" + d.name + "'");
    }
    descriptors_.push_back(d);
  }
}

void ToolServer::add_alias(std::string alias, const std::string& canonical) {
  auto it = index_.find(canonical);
  if (it == index_.end()) throw std::invalid_argument("alias target not registered: " + canonical);
  std::size_t slot = it->second;
  if (!index_.emplace(std::move(alias), slot).second) {
    throw std::invalid_argument("alias collides with an existing tool name");
  }
}

ToolCallResult ToolServer::call_tool(std::string_view name, const json& args) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UnknownToolError(std::string(name));
  const Tool& tool = tools_[it->second];

  if (auto failure = validate_arguments(tool.descriptor.input_schema, args)) {
    return ToolCallResult::error(*failure);
  }
  ToolCallResult result;
  try {
    result = tool.handler(args.is_null() ? json::object() : args);
  } catch (const std::exception& e) {
    result = ToolCallResult::error(std::string("tool failure: ") + e.what());
  }
  if (result.content.empty()) result.content.emplace_back();
  for (auto& block : result.content) block = truncate_output(std::move(block));
  return result;
}

RpcMessage ToolServer::handle_request(const RpcMessage& request) {
  const json& params = request.params;
  if (request.method == "initialize") {
    std::string version(kLatestProtocolVersion);
    if (params.is_object() && params.contains("protocolVersion") &&
        params["protocolVersion"].is_string()) {
      auto requested = params["protocolVersion"].get<std::string>();
      for (auto v : kSupportedVersions) {
        if (v == requested) version = requested;
      }
    }
    initialized_ = true;
    return RpcMessage::success(
        request.id, {{"protocolVersion", version},
                     {"capabilities", {{"tools", {{"listChanged", false}}}}},
                     {"serverInfo", {{"name", info_.name}, {"version", info_.version}}}});
  }

  if (request.method != "tools/list" && request.method != "tools/call") {
    return RpcMessage::failure(request.id, {error_code::kMethodNotFound,
                                            "method not found: " + request.method, std::nullopt});
  }
  if (!initialized_) {
    return RpcMessage::failure(request.id,
                               {error_code::kInvalidRequest, "server not initialized", std::nullopt});
  }

  if (request.method == "tools/list") {
    json tools = json::array();
    for (const auto& d : descriptors_) tools.push_back(d.to_json());
    return RpcMessage::success(request.id, {{"tools", std::move(tools)}});
  }

  if (!params.is_object() || !params.contains("name") || !params["name"].is_string()) {
    return RpcMessage::failure(request.id,
                               {error_code::kInvalidParams, "tools/call requires a tool name", std::nullopt});
  }
  json args = params.contains("arguments") ? params["arguments"] : json::object();
  try {
    return RpcMessage::success(request.id,
                               call_tool(params["name"].get<std::string>(), args).to_json());
  } catch (const UnknownToolError& e) {
    return RpcMessage::failure(request.id, {error_code::kInvalidParams, e.what(), std::nullopt});
  }
}

std::optional<RpcMessage> ToolServer::handle(const RpcMessage& message) {
  switch (message.kind) {
    case MessageKind::notification:
    case MessageKind::response:
      return std::nullopt;
    case MessageKind::request:
      try {
        return handle_request(message);
      } catch (const std::exception& e) {
        return RpcMessage::failure(message.id, {error_code::kInternalError, e.what(), std::nullopt});
      }
  }
  return std::nullopt;
}

std::optional<std::string> ToolServer::handle_line(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  if (line.find_first_not_of(" \t") == std::string_view::npos) return std::nullopt;

  std::optional<RpcMessage> response;
  try {
    response = handle(decode_line(line));
  } catch (const ProtocolError& e) {
    response = RpcMessage::failure(e.id(), {e.code(), e.what(), std::nullopt});
  }
  if (!response) return std::nullopt;
  std::string encoded = encode_line(*response);
  encoded.pop_back();
  return encoded;
}

int ToolServer::serve(std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (auto response = handle_line(line)) {
      out << *response << '\n';
      out.flush();
    }
  }
  return 0;
}

}  // namespace pentestmcp::mcp
