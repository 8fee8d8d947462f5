#include <cstdlib>
#include <iostream>

#include "backend_options.hpp"
#include "pentestmcp/mock/fake_msf_daemon.hpp"
#include "pentestmcp/msf/http.hpp"
#include "pentestmcp/msf/tools.hpp"

using namespace pentestmcp;

int main(int argc, char** argv) {
  CLI::App app{"MCP server exposing Metasploit over stdio"};
  app.name("pentestmcp-metasploit");
  cli::BackendOptions opts;
  cli::add_backend_options(app, opts);

  msf::RpcEndpoint endpoint;
  int rpc_timeout = 60;
  long session_wait_ms = 30'000, session_poll_ms = 1'000, read_poll_ms = 500;
  app.add_option("--msf-host", endpoint.host, "msfrpcd host")->capture_default_str();
  app.add_option("--msf-port", endpoint.port, "msfrpcd port")->check(CLI::Range(1, 65535))->capture_default_str();
  app.add_option("--msf-user", endpoint.username, "msfrpcd user")->capture_default_str();
  app.add_flag("--tls", endpoint.tls, "Use HTTPS to reach msfrpcd");
  app.add_option("--rpc-timeout-secs", rpc_timeout, "HTTP timeout per RPC call")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--session-wait-ms", session_wait_ms, "How long an exploit waits for a session")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--session-poll-ms", session_poll_ms, "Session list polling interval")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--read-poll-ms", read_poll_ms, "Session output polling interval")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.footer("The msfrpcd password is read from the MSF_PASSWORD environment variable.");
  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<msf::RpcTransport> transport;
  if (opts.backend == "mock") {
    auto daemon = std::make_shared<mock::FakeMsfDaemon>(cli::load_mock_scenario(opts, app.get_name()));
    transport = std::make_unique<mock::FakeDaemonTransport>(daemon);
    endpoint.password = "mock";
  } else {
    const char* password = std::getenv("MSF_PASSWORD");
    if (!password || !*password) {
      std::cerr << "pentestmcp-metasploit: set MSF_PASSWORD for --backend real\n";
      return 2;
    }
    endpoint.password = password;
    transport = std::make_unique<msf::HttpTransport>(endpoint, rpc_timeout);
  }

  msf::MsfToolConfig config;
  config.session_wait = std::chrono::milliseconds(session_wait_ms);
  config.session_poll = std::chrono::milliseconds(session_poll_ms);
  config.read_poll = std::chrono::milliseconds(read_poll_ms);
  auto client = std::make_shared<msf::RpcClient>(endpoint, std::move(transport));
  mcp::ToolServer server = msf::make_metasploit_server(client, config);
  std::ios::sync_with_stdio(false);
  return server.serve(std::cin, std::cout);
}
