// Flags shared by the tool server binaries.
#pragma once

#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "pentestmcp/mock/scenario.hpp"
#include "pentestmcp/paths.hpp"

namespace pentestmcp::cli {

struct BackendOptions {
  std::string backend = "real";
  std::string scenario;
};

inline void add_backend_options(CLI::App& app, BackendOptions& opts) {
  app.add_option("--backend", opts.backend, "Execution backend")
      ->check(CLI::IsMember({"real", "mock"}))
      ->capture_default_str();
  app.add_option("--scenario", opts.scenario,
                 "Scenario fixture for --backend mock (name or path; default $PENTESTMCP_MOCK_SCENARIO)");
}

/// Loads the scenario for mock mode; exits with status 2 on failure.
inline std::shared_ptr<const mock::ScenarioFixture> load_mock_scenario(const BackendOptions& opts,
                                                                       const std::string& program) {
  std::string name = opts.scenario;
  if (name.empty()) {
    if (const char* env = std::getenv("PENTESTMCP_MOCK_SCENARIO")) name = env;
  }
  if (name.empty()) {
    std::cerr << program << ": --backend mock needs --scenario\n";
    std::exit(2);
  }
  try {
    return std::make_shared<const mock::ScenarioFixture>(
        mock::load_scenario(resolve_data_file(name, "scenarios")));
  } catch (const std::exception& e) {
    std::cerr << program << ": " << e.what() << "\n";
    std::exit(2);
  }
}

}  // namespace pentestmcp::cli
