#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "pentestmcp/msf/http.hpp"

#include <mutex>
#include <stdexcept>
#include <thread>

#include "httplib.h"

namespace pentestmcp::msf {

struct HttpTransport::Impl {
  std::unique_ptr<httplib::Client> client;
  std::string path;
};

HttpTransport::HttpTransport(const RpcEndpoint& endpoint, int timeout_secs) : impl_(std::make_unique<Impl>()) {
  std::string scheme = endpoint.tls ? "https://" : "http://";
  impl_->client = std::make_unique<httplib::Client>(scheme + endpoint.host + ":" + std::to_string(endpoint.port));
  // msfrpcd ships a self-signed certificate by default.
  impl_->client->enable_server_certificate_verification(false);
  impl_->client->set_connection_timeout(10);
  impl_->client->set_read_timeout(timeout_secs);
  impl_->client->set_write_timeout(timeout_secs);
  impl_->path = endpoint.path;
}

HttpTransport::~HttpTransport() = default;

std::string HttpTransport::post(std::string_view body) {
  auto res = impl_->client->Post(impl_->path, std::string(body), kMsgpackContentType);
  if (!res) {
    throw MsfError(MsfError::Kind::transport, "RPC transport failure: " + httplib::to_string(res.error()));
  }
  // msfrpcd answers auth failures with 401 and a msgpack error body.
  if (res->body.empty()) {
    throw MsfError(MsfError::Kind::transport, "RPC transport failure: HTTP status " + std::to_string(res->status));
  }
  return res->body;
}

struct RpcHttpListener::Impl {
  RpcHandler handler;
  std::string path;
  httplib::Server server;
  std::thread thread;
  std::mutex mutex;  // the handler is single-owner state
};

RpcHttpListener::RpcHttpListener(RpcHandler handler, std::string path) : impl_(std::make_unique<Impl>()) {
  impl_->handler = std::move(handler);
  impl_->path = std::move(path);
  impl_->server.new_task_queue = [] { return new httplib::ThreadPool(1); };
  impl_->server.Post(impl_->path, [impl = impl_.get()](const httplib::Request& req, httplib::Response& res) {
    std::string reply;
    {
      std::lock_guard lock(impl->mutex);
      reply = impl->handler(req.body);
    }
    res.set_content(reply, kMsgpackContentType);
  });
}

RpcHttpListener::~RpcHttpListener() { stop(); }

int RpcHttpListener::start(int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port("127.0.0.1");
  } else if (!impl_->server.bind_to_port("127.0.0.1", port)) {
    bound = -1;
  }
  if (bound <= 0) throw std::runtime_error("cannot bind 127.0.0.1:" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void RpcHttpListener::run(int port) {
  if (!impl_->server.listen("127.0.0.1", port)) {
    throw std::runtime_error("cannot listen on 127.0.0.1:" + std::to_string(port));
  }
}

void RpcHttpListener::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace pentestmcp::msf
