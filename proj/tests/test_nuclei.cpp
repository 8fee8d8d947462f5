#include "doctest.h"
#include "pentestmcp/scan/nuclei.hpp"
#include "parser_oracles.hpp"
#include "support.hpp"

using namespace pentestmcp::scan;
using testsupport::fixture;
using testsupport::read_file;

namespace {

std::vector<VulnFinding> load(const std::string& name) {
  return parse_nuclei_jsonl(read_file(fixture("nuclei/" + name)));
}

std::size_t error_line(const std::string& name) {
  try {
    load(name);
  } catch (const NucleiParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_SUITE("nuclei jsonl") {
  TEST_CASE("fixtures parse to their expected records") {
    // Blank lines, CRLF endings, legacy keys and the host fallback are all covered.
    for (const auto& oracle : testsupport::nuclei_oracles()) {
      CAPTURE(oracle.fixture);
      CHECK(load(oracle.fixture) == oracle.expected);
    }
  }

  TEST_CASE("malformed records name their line") {
    for (const auto& fault : testsupport::nuclei_faults()) CHECK(error_line(fault.fixture) == fault.line);
    CHECK_THROWS_WITH_AS(load("malformed_severity.jsonl"), "nuclei output line 2: unknown severity 'urgent'",
                         NucleiParseError);
    CHECK_THROWS_WITH_AS(parse_nuclei_jsonl("{\"info\":{\"severity\":\"low\"},\"matched-at\":\"x\"}"),
                         "nuclei output line 1: missing template-id", NucleiParseError);
    CHECK_THROWS_WITH_AS(parse_nuclei_jsonl("\n{\"template-id\":\"a\",\"matched-at\":\"x\"}"),
                         "nuclei output line 2: missing severity", NucleiParseError);
    CHECK_THROWS_WITH_AS(parse_nuclei_jsonl("{\"template-id\":\"a\",\"info\":{\"severity\":\"low\"}}"),
                         "nuclei output line 1: missing matched-at", NucleiParseError);
    CHECK_THROWS_WITH_AS(parse_nuclei_jsonl("[1,2]"), "nuclei output line 1: not a JSON object", NucleiParseError);
  }

  TEST_CASE("records produced by to_jsonl_record parse back") {
    std::vector<VulnFinding> findings = load("struts_findings.jsonl");
    std::string text;
    for (const auto& f : findings) text += to_jsonl_record(f).dump() + "\n";
    CHECK(parse_nuclei_jsonl(text) == findings);
    auto record = to_jsonl_record(findings[1]);
    CHECK(record["host"] == "10.138.0.19");
    CHECK(record["info"]["severity"] == "critical");
  }

  TEST_CASE("rendering") {
    CHECK(render_finding({"CVE-2017-5638", Severity::critical, "http://10.138.0.19/struts2-showcase/"}) ==
          "[CVE-2017-5638] [critical] http://10.138.0.19/struts2-showcase/");
    CHECK(render_findings({}) == "no findings");
    CHECK(render_findings(load("mixed_severity.jsonl")) ==
          "[tech-detect] [info] https://files.lab:8443/\n"
          "[http-missing-security-headers] [info] https://files.lab:8443/\n"
          "[exposed-gitignore] [low] https://files.lab:8443/.gitignore\n"
          "[openssh-detect] [medium] files.lab:22");
  }

  TEST_CASE("severity names") {
    CHECK(parse_severity("critical") == Severity::critical);
    CHECK(parse_severity("HIGH") == Severity::high);
    CHECK_FALSE(parse_severity("urgent").has_value());
    CHECK(to_string(Severity::medium) == "medium");
  }
}
