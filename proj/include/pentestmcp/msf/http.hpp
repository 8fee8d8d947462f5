// HTTP carriage for MessagePack-RPC: the client transport used against a
// real msfrpcd, and a loopback listener that exposes any in-process RPC
// handler the same way.
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "pentestmcp/msf/rpc.hpp"

namespace pentestmcp::msf {

class HttpTransport final : public RpcTransport {
 public:
  explicit HttpTransport(const RpcEndpoint& endpoint, int timeout_secs = 60);
  ~HttpTransport() override;

  std::string post(std::string_view body) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

using RpcHandler = std::function<std::string(std::string_view request_body)>;

/// Serves POST <path> on 127.0.0.1 from a background thread.
class RpcHttpListener {
 public:
  RpcHttpListener(RpcHandler handler, std::string path = "/api/");
  ~RpcHttpListener();

  /// Binds (port 0 picks a free port) and starts serving. Returns the bound
  /// port; throws std::runtime_error if binding fails.
  int start(int port = 0);
  /// Blocks serving on the calling thread until stop() is called.
  void run(int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pentestmcp::msf
