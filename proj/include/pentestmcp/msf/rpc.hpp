// Metasploit MessagePack-RPC client.
#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pentestmcp/msf/msgpack.hpp"

namespace pentestmcp::msf {

inline constexpr int kDefaultRpcPort = 55553;
inline constexpr const char* kMsgpackContentType = "binary/message-pack";

struct RpcEndpoint {
  std::string host = "127.0.0.1";
  int port = kDefaultRpcPort;
  std::string username = "msf";
  std::string password;
  bool tls = false;
  std::string path = "/api/";
};

class MsfError : public std::runtime_error {
 public:
  enum class Kind { transport, daemon, auth };

  MsfError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }
  /// Transport failures may succeed on a later attempt; daemon errors won't.
  bool retriable() const noexcept { return kind_ == Kind::transport; }

 private:
  Kind kind_;
};

/// Carries one encoded request to the daemon and returns the encoded
/// response body. Throws MsfError(transport) when no response arrives.
class RpcTransport {
 public:
  virtual ~RpcTransport() = default;
  virtual std::string post(std::string_view body) = 0;
};

/// Holds the session token; all calls after login carry it as their first
/// parameter. The token is never included in errors or returned values.
class RpcClient {
 public:
  RpcClient(RpcEndpoint endpoint, std::unique_ptr<RpcTransport> transport);

  /// auth.login with the endpoint credentials. Throws MsfError(auth).
  void login();
  bool logged_in() const { return token_.has_value(); }

  /// Token-prefixed call; logs in first if needed. An expired token gets
  /// one transparent re-login and retry.
  msgpack::Value call(std::string_view method, msgpack::Array params = {});

  const RpcEndpoint& endpoint() const { return endpoint_; }

  /// Only for tests that scan outputs for token leakage.
  const std::optional<std::string>& token_for_testing() const { return token_; }

 private:
  msgpack::Value send(msgpack::Array request);

  RpcEndpoint endpoint_;
  std::unique_ptr<RpcTransport> transport_;
  std::optional<std::string> token_;
};

/// True for daemon error maps ({"error": true, ...}).
bool is_error_map(const msgpack::Value& value);

/// Daemon error map signalling a missing, bad or expired token.
bool is_auth_error(const msgpack::Value& value);

}  // namespace pentestmcp::msf
