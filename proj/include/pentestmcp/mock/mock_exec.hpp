// Scanner stand-ins: synthesizes nmap, nuclei and curl output from a
// scenario fixture instead of touching the network.
#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "pentestmcp/mock/scenario.hpp"
#include "pentestmcp/scan/exec_backend.hpp"

namespace pentestmcp::mock {

/// Output the named binary would have produced against the fixture world.
/// Deterministic for identical argv; unknown binaries exit with 127.
ProcessOutput mock_exec(const ScenarioFixture& fixture, const std::vector<std::string>& argv,
                        std::string_view input = {});

class MockExecBackend final : public scan::ExecBackend {
 public:
  explicit MockExecBackend(std::shared_ptr<const ScenarioFixture> fixture) : fixture_(std::move(fixture)) {}

  ProcessOutput run(const std::vector<std::string>& argv, std::string_view input,
                    std::chrono::seconds timeout) override;

  std::vector<std::vector<std::string>> invocations() const;

 private:
  std::shared_ptr<const ScenarioFixture> fixture_;
  mutable std::mutex mutex_;
  std::vector<std::vector<std::string>> invocations_;
};

}  // namespace pentestmcp::mock
