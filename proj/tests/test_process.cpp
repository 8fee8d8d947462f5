#include "doctest.h"
#include "pentestmcp/process.hpp"

using namespace pentestmcp;
using namespace std::chrono_literals;

TEST_SUITE("process") {
  TEST_CASE("argv is passed without a shell") {
    auto out = run_process({"/bin/echo", "a;b", "$(id)"}, {}, 5s);
    CHECK(out.exit_code == 0);
    CHECK(out.out == "a;b $(id)\n");
  }

  TEST_CASE("stdin is fed and stderr collected separately") {
    auto out = run_process({"/bin/sh", "-c", "cat; echo oops >&2; exit 3"}, "hello", 5s);
    CHECK(out.exit_code == 3);
    CHECK(out.out == "hello");
    CHECK(out.err == "oops\n");
    CHECK_FALSE(out.timed_out);
  }

  TEST_CASE("large output does not deadlock") {
    auto out = run_process({"/bin/sh", "-c", "head -c 1000000 /dev/zero"}, std::string(300000, 'x'), 10s);
    CHECK(out.exit_code == 0);
    CHECK(out.out.size() == 1000000);
  }

  TEST_CASE("timeouts kill the child") {
    auto start = std::chrono::steady_clock::now();
    auto out = run_process({"/bin/sleep", "10"}, {}, 200ms);
    CHECK(out.timed_out);
    CHECK(std::chrono::steady_clock::now() - start < 5s);
  }

  TEST_CASE("missing programs exit 127 and signals map to 128+n") {
    CHECK(run_process({"/nonexistent/prog"}, {}, 5s).exit_code == 127);
    CHECK(run_process({"/bin/sh", "-c", "kill -9 $$"}, {}, 5s).exit_code == 137);
  }

  TEST_CASE("long-lived child speaks lines") {
    ChildProcess child({"/bin/cat"});
    CHECK(child.write_all("one\ntwo\n"));
    CHECK(child.read_line(2s) == "one");
    CHECK(child.read_line(2s) == "two");
    CHECK_FALSE(child.read_line(100ms).has_value());
    child.close_stdin();
    CHECK_FALSE(child.read_line(2s).has_value());
    CHECK(child.wait() == 0);
    CHECK_THROWS_AS(ChildProcess(std::vector<std::string>{}), SpawnError);
    CHECK_THROWS_AS(ChildProcess({"/nonexistent/prog"}), SpawnError);
  }
}
