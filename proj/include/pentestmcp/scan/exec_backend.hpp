#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include "pentestmcp/process.hpp"

namespace pentestmcp::scan {

/// Runs an external tool. Implementations never go through a shell: argv
/// is handed over as a vector.
class ExecBackend {
 public:
  virtual ~ExecBackend() = default;
  virtual ProcessOutput run(const std::vector<std::string>& argv, std::string_view input,
                            std::chrono::seconds timeout) = 0;
};

/// Executes the real binaries found on PATH.
class ProcessBackend final : public ExecBackend {
 public:
  ProcessOutput run(const std::vector<std::string>& argv, std::string_view input,
                    std::chrono::seconds timeout) override {
    return run_process(argv, input, timeout);
  }
};

}  // namespace pentestmcp::scan
