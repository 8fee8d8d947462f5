// POSIX child processes driven through pipes. argv is always exec'd
// directly; no shell is ever involved.
#pragma once

#include <sys/types.h>

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pentestmcp {

class SpawnError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProcessOutput {
  int exit_code = -1;
  std::string out;
  std::string err;
  bool timed_out = false;
};

/// Runs argv to completion, feeding `input` on stdin and collecting stdout
/// and stderr. A child still running at `timeout` is killed and reported
/// with timed_out=true. Exit code is 128+signal for signalled children and
/// 127 when exec fails.
ProcessOutput run_process(const std::vector<std::string>& argv, std::string_view input,
                          std::chrono::milliseconds timeout);

/// Long-lived child with line-oriented stdin/stdout pipes; stderr is
/// inherited. Used to talk to MCP servers.
class ChildProcess {
 public:
  /// Throws SpawnError when argv is empty or the program cannot be exec'd.
  explicit ChildProcess(const std::vector<std::string>& argv);
  ~ChildProcess();

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;
  ChildProcess(ChildProcess&& other) noexcept;
  ChildProcess& operator=(ChildProcess&& other) noexcept;

  pid_t pid() const { return pid_; }

  /// False when the child has closed its stdin (e.g. it exited).
  bool write_all(std::string_view data);

  /// Next '\n'-terminated line without the terminator; nullopt on EOF or
  /// when `timeout` passes without a complete line.
  std::optional<std::string> read_line(std::chrono::milliseconds timeout);

  void close_stdin();
  void kill();
  /// Waits for exit; returns the exit code (128+signal when signalled).
  int wait();

 private:
  void release() noexcept;

  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  std::string buffer_;
  bool eof_ = false;
  std::optional<int> status_;
};

}  // namespace pentestmcp
