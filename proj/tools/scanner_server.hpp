// main() body shared by the nmap, curl and nuclei servers.
#pragma once

#include <chrono>
#include <functional>
#include <iostream>

#include "backend_options.hpp"
#include "pentestmcp/mock/mock_exec.hpp"
#include "pentestmcp/scan/tools.hpp"

namespace pentestmcp::cli {

using ServerFactory = std::function<mcp::ToolServer(std::shared_ptr<scan::ExecBackend>, std::chrono::seconds)>;

inline int scanner_server_main(int argc, char** argv, const std::string& program, std::chrono::seconds default_timeout,
                               const ServerFactory& make_server) {
  CLI::App app{"MCP server exposing " + program.substr(program.rfind('-') + 1) + " over stdio"};
  app.name(program);
  BackendOptions opts;
  add_backend_options(app, opts);
  long timeout_secs = default_timeout.count();
  app.add_option("--timeout-secs", timeout_secs, "Per-invocation timeout")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  std::shared_ptr<scan::ExecBackend> backend;
  if (opts.backend == "mock") {
    backend = std::make_shared<mock::MockExecBackend>(load_mock_scenario(opts, program));
  } else {
    backend = std::make_shared<scan::ProcessBackend>();
  }
  mcp::ToolServer server = make_server(backend, std::chrono::seconds(timeout_secs));
  std::ios::sync_with_stdio(false);
  return server.serve(std::cin, std::cout);
}

}  // namespace pentestmcp::cli
