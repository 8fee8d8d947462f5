#include "pentestmcp/msf/rpc.hpp"

namespace pentestmcp::msf {

bool is_error_map(const msgpack::Value& value) {
  const msgpack::Value* flag = value.find("error");
  return flag && flag->is_bool() && flag->as_bool();
}

bool is_auth_error(const msgpack::Value& value) {
  if (!is_error_map(value)) return false;
  if (const msgpack::Value* code = value.find("error_code"); code && code->is_int() && code->as_int() == 401) {
    return true;
  }
  return value.get_string("error_message").find("Authentication Token") != std::string::npos;
}

RpcClient::RpcClient(RpcEndpoint endpoint, std::unique_ptr<RpcTransport> transport)
    : endpoint_(std::move(endpoint)), transport_(std::move(transport)) {
  if (!transport_) throw std::invalid_argument("RpcClient needs a transport");
}

msgpack::Value RpcClient::send(msgpack::Array request) {
  std::string body = transport_->post(msgpack::encode(msgpack::Value(std::move(request))));
  try {
    return msgpack::decode(body);
  } catch (const msgpack::DecodeError& e) {
    throw MsfError(MsfError::Kind::transport, std::string("undecodable daemon response: ") + e.what());
  }
}

void RpcClient::login() {
  token_.reset();
  msgpack::Value response = send({"auth.login", endpoint_.username, endpoint_.password});
  if (is_error_map(response)) {
    throw MsfError(MsfError::Kind::auth, "login failed: " + response.get_string("error_message", "unknown error"));
  }
  const msgpack::Value* token = response.find("token");
  if (response.get_string("result") != "success" || !token || !token->is_string()) {
    throw MsfError(MsfError::Kind::auth, "login failed: daemon returned no token");
  }
  token_ = token->as_string();
}

msgpack::Value RpcClient::call(std::string_view method, msgpack::Array params) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (!token_) login();
    msgpack::Array request;
    request.reserve(params.size() + 2);
    request.emplace_back(method);
    request.emplace_back(*token_);
    request.insert(request.end(), params.begin(), params.end());

    msgpack::Value response = send(std::move(request));
    if (is_auth_error(response) && attempt == 0) {
      token_.reset();
      continue;
    }
    if (is_error_map(response)) {
      auto kind = is_auth_error(response) ? MsfError::Kind::auth : MsfError::Kind::daemon;
      throw MsfError(kind, std::string(method) + ": " + response.get_string("error_message", "daemon error"));
    }
    return response;
  }
  throw MsfError(MsfError::Kind::auth, std::string(method) + ": authentication failed after re-login");
}

}  // namespace pentestmcp::msf
