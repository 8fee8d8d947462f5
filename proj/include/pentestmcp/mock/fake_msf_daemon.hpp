// In-process stand-in for msfrpcd, answering the MessagePack-RPC calls the
// metasploit server makes from a scenario fixture.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pentestmcp/mock/scenario.hpp"
#include "pentestmcp/msf/msgpack.hpp"
#include "pentestmcp/msf/rpc.hpp"

namespace pentestmcp::mock {

/// One write or read on a session channel, in call order.
struct ChannelEvent {
  std::int64_t session_id = 0;
  std::string channel;  // "shell" or "meterpreter"
  std::string method;   // full RPC method name
  std::string data;
};

/// Sessions are created only by an execute that satisfies an exploit rule,
/// with ids 1, 2, 3, ... Not thread-safe: one owner at a time.
class FakeMsfDaemon {
 public:
  explicit FakeMsfDaemon(std::shared_ptr<const ScenarioFixture> fixture);

  /// Decodes a request body and encodes the response. Throws
  /// msgpack::DecodeError for malformed input.
  std::string handle(std::string_view body);

  /// [method, args...] -> response value (an error map on failure).
  msgpack::Value dispatch(const msgpack::Array& request);

  /// Invalidates every issued token, as a daemon restart would.
  void expire_tokens();

  std::size_t call_count() const { return calls_; }
  const std::vector<ChannelEvent>& channel_log() const { return channel_log_; }
  std::vector<std::int64_t> session_ids() const;

 private:
  struct Session {
    std::string type;
    std::string tunnel_local;
    std::string tunnel_peer;
    std::string via_exploit;
    std::string via_payload;
    std::string info;
    std::string session_host;
    int session_port = 0;
    std::string exploit_uuid;
    std::string pending;
  };

  msgpack::Value login(const msgpack::Array& req);
  msgpack::Value search(std::string_view query) const;
  msgpack::Value module_info(std::string_view type, std::string_view name) const;
  msgpack::Value module_options(std::string_view type, std::string_view name) const;
  msgpack::Value compatible_payloads(std::string_view name) const;
  msgpack::Value execute(std::string_view type, std::string_view name, const msgpack::Value& options);
  msgpack::Value session_list() const;
  msgpack::Value session_write(const msgpack::Array& req, const std::string& channel);
  msgpack::Value session_read(const msgpack::Array& req, const std::string& channel);

  std::shared_ptr<const ScenarioFixture> fixture_;
  std::vector<std::string> tokens_;
  std::uint64_t token_counter_ = 0;
  std::map<std::int64_t, Session> sessions_;
  std::int64_t next_session_ = 1;
  std::int64_t next_job_ = 0;
  std::size_t calls_ = 0;
  std::vector<ChannelEvent> channel_log_;
};

/// RpcTransport delivering requests straight to a FakeMsfDaemon. Malformed
/// requests surface as transport errors.
class FakeDaemonTransport final : public msf::RpcTransport {
 public:
  explicit FakeDaemonTransport(std::shared_ptr<FakeMsfDaemon> daemon) : daemon_(std::move(daemon)) {}
  std::string post(std::string_view body) override;

 private:
  std::shared_ptr<FakeMsfDaemon> daemon_;
};

/// Daemon error map in msfrpcd's shape.
msgpack::Value daemon_error(std::string_view message, int code = 500);

}  // namespace pentestmcp::mock
