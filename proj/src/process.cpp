#include "pentestmcp/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <utility>

namespace pentestmcp {

namespace {

using Clock = std::chrono::steady_clock;

struct Pipe {
  int read = -1;
  int write = -1;
};

Pipe make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) throw SpawnError(std::string("pipe: ") + std::strerror(errno));
  return {fds[0], fds[1]};
}

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

int decode_status(int status) {
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return -1;
}

void ignore_sigpipe() {
  static const bool once = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

/// Forks and execs argv with the given fds as stdin/stdout/stderr (-1 means
/// inherit). Returns the pid; exec failure is reported through a CLOEXEC
/// status pipe so the caller sees it synchronously.
pid_t spawn(const std::vector<std::string>& argv, int in_fd, int out_fd, int err_fd) {
  if (argv.empty()) throw SpawnError("empty argv");
  ignore_sigpipe();

  std::vector<char*> cargv;
  cargv.reserve(argv.size() + 1);
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  Pipe status = make_pipe();
  pid_t pid = ::fork();
  if (pid < 0) {
    close_fd(status.read);
    close_fd(status.write);
    throw SpawnError(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    if (in_fd >= 0) ::dup2(in_fd, STDIN_FILENO);
    if (out_fd >= 0) ::dup2(out_fd, STDOUT_FILENO);
    if (err_fd >= 0) ::dup2(err_fd, STDERR_FILENO);
    ::execvp(cargv[0], cargv.data());
    int code = errno;
    (void)!::write(status.write, &code, sizeof code);
    ::_exit(127);
  }
  close_fd(status.write);
  int code = 0;
  ssize_t n;
  do {
    n = ::read(status.read, &code, sizeof code);
  } while (n < 0 && errno == EINTR);
  close_fd(status.read);
  if (n == sizeof code) {
    ::waitpid(pid, nullptr, 0);
    throw SpawnError("cannot execute '" + argv[0] + "': " + std::strerror(code));
  }
  return pid;
}

}  // namespace

ProcessOutput run_process(const std::vector<std::string>& argv, std::string_view input,
                          std::chrono::milliseconds timeout) {
  ProcessOutput result;
  Pipe in = make_pipe();
  Pipe out = make_pipe();
  Pipe err = make_pipe();

  pid_t pid;
  try {
    pid = spawn(argv, in.read, out.write, err.write);
  } catch (const SpawnError& e) {
    for (int* fd : {&in.read, &in.write, &out.read, &out.write, &err.read, &err.write}) close_fd(*fd);
    result.exit_code = 127;
    result.err = e.what();
    return result;
  }
  close_fd(in.read);
  close_fd(out.write);
  close_fd(err.write);
  ::fcntl(in.write, F_SETFL, O_NONBLOCK);

  std::size_t written = 0;
  if (input.empty()) close_fd(in.write);

  const auto deadline = Clock::now() + timeout;
  char buf[65536];
  while (out.read >= 0 || err.read >= 0) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) {
      result.timed_out = true;
      ::kill(pid, SIGKILL);
      break;
    }
    pollfd fds[3];
    int count = 0;
    int out_slot = -1, err_slot = -1, in_slot = -1;
    if (out.read >= 0) { fds[count] = {out.read, POLLIN, 0}; out_slot = count++; }
    if (err.read >= 0) { fds[count] = {err.read, POLLIN, 0}; err_slot = count++; }
    if (in.write >= 0) { fds[count] = {in.write, POLLOUT, 0}; in_slot = count++; }
    int rc = ::poll(fds, count, static_cast<int>(remaining.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    auto drain = [&](int slot, int& fd, std::string& sink) {
      if (slot < 0 || !(fds[slot].revents & (POLLIN | POLLHUP | POLLERR))) return;
      ssize_t n = ::read(fd, buf, sizeof buf);
      if (n > 0) {
        sink.append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        close_fd(fd);
      }
    };
    drain(out_slot, out.read, result.out);
    drain(err_slot, err.read, result.err);
    if (in_slot >= 0 && (fds[in_slot].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t n = ::write(in.write, input.data() + written, input.size() - written);
      if (n > 0) written += static_cast<std::size_t>(n);
      if (n < 0 && errno != EAGAIN && errno != EINTR) close_fd(in.write);
      if (written == input.size()) close_fd(in.write);
    }
  }
  for (int* fd : {&in.write, &out.read, &err.read}) close_fd(*fd);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  result.exit_code = decode_status(status);
  return result;
}

ChildProcess::ChildProcess(const std::vector<std::string>& argv) {
  Pipe in = make_pipe();
  Pipe out = make_pipe();
  try {
    pid_ = spawn(argv, in.read, out.write, -1);
  } catch (...) {
    for (int* fd : {&in.read, &in.write, &out.read, &out.write}) close_fd(*fd);
    throw;
  }
  close_fd(in.read);
  close_fd(out.write);
  stdin_fd_ = in.write;
  stdout_fd_ = out.read;
}

ChildProcess::~ChildProcess() { release(); }

ChildProcess::ChildProcess(ChildProcess&& other) noexcept
    : pid_(std::exchange(other.pid_, -1)),
      stdin_fd_(std::exchange(other.stdin_fd_, -1)),
      stdout_fd_(std::exchange(other.stdout_fd_, -1)),
      buffer_(std::move(other.buffer_)),
      eof_(other.eof_),
      status_(other.status_) {}

ChildProcess& ChildProcess::operator=(ChildProcess&& other) noexcept {
  if (this != &other) {
    release();
    pid_ = std::exchange(other.pid_, -1);
    stdin_fd_ = std::exchange(other.stdin_fd_, -1);
    stdout_fd_ = std::exchange(other.stdout_fd_, -1);
    buffer_ = std::move(other.buffer_);
    eof_ = other.eof_;
    status_ = other.status_;
  }
  return *this;
}

void ChildProcess::release() noexcept {
  close_fd(stdin_fd_);
  close_fd(stdout_fd_);
  if (pid_ > 0 && !status_) {
    // Closing stdin asks a well-behaved server to exit; give it a moment.
    for (int i = 0; i < 50; ++i) {
      int status;
      pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_ || r < 0) {
        pid_ = -1;
        return;
      }
      ::usleep(10'000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }
  pid_ = -1;
}

bool ChildProcess::write_all(std::string_view data) {
  while (!data.empty()) {
    if (stdin_fd_ < 0) return false;
    ssize_t n = ::write(stdin_fd_, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

std::optional<std::string> ChildProcess::read_line(std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  while (true) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    if (eof_ || stdout_fd_ < 0) return std::nullopt;
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) return std::nullopt;
    pollfd pfd{stdout_fd_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (rc < 0 && errno == EINTR) continue;
    if (rc <= 0) return std::nullopt;
    char buf[65536];
    ssize_t n = ::read(stdout_fd_, buf, sizeof buf);
    if (n > 0) {
      buffer_.append(buf, static_cast<std::size_t>(n));
    } else if (n == 0 || errno != EINTR) {
      eof_ = true;
    }
  }
}

void ChildProcess::close_stdin() { close_fd(stdin_fd_); }

void ChildProcess::kill() {
  if (pid_ > 0 && !status_) ::kill(pid_, SIGKILL);
}

int ChildProcess::wait() {
  if (status_) return *status_;
  if (pid_ <= 0) return -1;
  int status = 0;
  while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
  }
  status_ = decode_status(status);
  return *status_;
}

}  // namespace pentestmcp
