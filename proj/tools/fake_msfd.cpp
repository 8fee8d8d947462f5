#include <csignal>
#include <iostream>

#include "backend_options.hpp"
#include "pentestmcp/mock/fake_msf_daemon.hpp"
#include "pentestmcp/msf/http.hpp"

using namespace pentestmcp;

int main(int argc, char** argv) {
  CLI::App app{"Fake msfrpcd serving a scenario fixture on a loopback port"};
  app.name("pentestmcp-fake-msfd");
  std::string scenario;
  int port = msf::kDefaultRpcPort;
  app.add_option("--scenario", scenario, "Scenario fixture (name or path)")->required();
  app.add_option("--listen", port, "Loopback port, 0 picks a free one")
      ->check(CLI::Range(0, 65535))
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  cli::BackendOptions opts{"mock", scenario};
  auto daemon = std::make_shared<mock::FakeMsfDaemon>(cli::load_mock_scenario(opts, app.get_name()));
  msf::RpcHttpListener listener([daemon](std::string_view body) {
    try {
      return daemon->handle(body);
    } catch (const msgpack::DecodeError& e) {
      return msgpack::encode(mock::daemon_error(e.what(), 400));
    }
  });

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  int bound = 0;
  try {
    bound = listener.start(port);
  } catch (const std::exception& e) {
    std::cerr << app.get_name() << ": " << e.what() << "\n";
    return 1;
  }
  std::cout << "listening on 127.0.0.1:" << bound << std::endl;

  int received = 0;
  sigwait(&signals, &received);
  listener.stop();
  return 0;
}
