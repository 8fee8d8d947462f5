// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "daemon_properties.hpp"
#include "msgpack_gen.hpp"
#include "parser_oracles.hpp"
#include "pentestmcp/msf/msgpack.hpp"
#include "pentestmcp/orchestrator/client.hpp"
#include "pentestmcp/orchestrator/runner.hpp"
#include "pentestmcp/process.hpp"
#include "pentestmcp/scan/nmap.hpp"
#include "pentestmcp/scan/nuclei.hpp"
#include "pentestmcp/scan/sanitize.hpp"
#include "pentestmcp/scan/xml.hpp"
#include "sanitize_oracle.hpp"
#include "support.hpp"

using namespace pentestmcp;
using Clock = std::chrono::steady_clock;

namespace {

/// Empty on success, otherwise what went wrong. `summary` describes what
/// was checked.
struct Outcome {
  std::optional<std::string> failure;
  std::string summary;
};

struct Criterion {
  int number;
  std::string title;
  std::chrono::milliseconds limit;
  std::function<Outcome()> check;
};

Outcome fail(std::string why) { return {std::move(why), ""}; }
Outcome pass(std::string summary) { return {std::nullopt, std::move(summary)}; }

std::filesystem::path scenario_file(const std::string& name) {
  return testsupport::source_dir() / "scenarios" / (name + ".json");
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

/// Runs pentestmcp-run with a structured report and parses it.
std::variant<orchestrator::TraceReport, std::string> run_plan_cli(const std::string& plan, const std::string& scenario) {
  testsupport::TempDir dir;
  auto out = dir.path() / "report.json";
  auto r = run_process({testsupport::tool("pentestmcp-run").string(), "--plan", plan, "--scenario", scenario,
                        "--backend", "mock", "--report", "structured", "--out", out.string()},
                       {}, std::chrono::seconds(30));
  if (r.timed_out) return std::string("pentestmcp-run timed out");
  if (r.exit_code != 0) return "pentestmcp-run exited " + std::to_string(r.exit_code) + ": " + r.err;
  try {
    return orchestrator::parse_report(testsupport::read_file(out));
  } catch (const std::exception& e) {
    return std::string("unreadable report: ") + e.what();
  }
}

std::string all_responses(const orchestrator::TraceReport& report, std::size_t from = 0) {
  std::string text;
  for (std::size_t i = from; i < report.records.size(); ++i) text += report.records[i].response + "\n";
  return text;
}

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

Outcome tool_lists() {
  const std::vector<std::pair<std::string, std::set<std::string>>> expected = {
      {"nmap", {"nmap_scan"}},
      {"curl", {"curl_request"}},
      {"nuclei", {"nuclei_scan"}},
      {"metasploit",
       {"metasploit_search", "metasploit_info", "metasploit_module_payloads", "metasploit_payload_info",
        "metasploit_exploit", "metasploit_sessions", "metasploit_session_interact"}},
  };
  for (const auto& [name, tools] : expected) {
    orchestrator::McpClient client(name,
                                   {testsupport::tool("pentestmcp-" + name).string(), "--backend", "mock",
                                    "--scenario", scenario_file("struts-5638").string()},
                                   std::chrono::seconds(5));
    auto names = client.tool_names();
    std::set<std::string> got(names.begin(), names.end());
    if (got != tools || got.size() != names.size()) return fail(name + " lists {" + join(names) + "}");
  }
  return pass("4 servers list exactly their tools");
}

Outcome struts_chain() {
  auto result = run_plan_cli("plan-5638", "struts-5638");
  if (auto* err = std::get_if<std::string>(&result)) return fail(*err);
  const auto& report = std::get<orchestrator::TraceReport>(result);
  if (!report.completed()) return fail("outcome " + report.outcome());
  if (report.tool_call_count != 11) return fail("tool_call_count=" + std::to_string(report.tool_call_count));
  std::string text = all_responses(report);
  for (const char* needle : {"Apache Tomcat/Coyote JSP engine 1.1", "[CVE-2017-5638]", "struts2_content_type_ognl",
                             "Started reverse TCP handler on 10.138.0.21:4444", "Command shell session 1 opened",
                             "root:x:0:0:"}) {
    if (text.find(needle) == std::string::npos) return fail(std::string("no response contains '") + needle + "'");
  }
  if (trim(report.records.back().response) != "root")
    return fail("final whoami returned '" + report.records.back().response + "'");
  return pass("tool_call_count=11, whoami=root");
}

Outcome blue_chain() {
  auto result = run_plan_cli("plan-0144", "blue-0144");
  if (auto* err = std::get_if<std::string>(&result)) return fail(*err);
  const auto& report = std::get<orchestrator::TraceReport>(result);
  if (!report.completed()) return fail("outcome " + report.outcome());
  if (report.records.size() < 8) return fail("only " + std::to_string(report.records.size()) + " records");
  const auto& seventh = report.records[6];
  if (!seventh.is_error) return fail("step 7 did not return an error");
  if (seventh.response != "Input validation error: 'module_options' is a required property")
    return fail("step 7 returned '" + seventh.response + "'");
  std::string post = all_responses(report, 7);
  for (const char* needle : {"NT AUTHORITY SYSTEM", "JON-PC"}) {
    if (post.find(needle) == std::string::npos) return fail(std::string("post-exploitation lacks '") + needle + "'");
  }
  std::istringstream lines(post);
  bool hash = false;
  for (std::string line; std::getline(lines, line);) hash = hash || line.rfind("Administrator:500:", 0) == 0;
  if (!hash) return fail("no line starts with 'Administrator:500:'");
  return pass(std::to_string(report.tool_call_count) + " calls, step 7 validation error as expected");
}

Outcome parsers() {
  using testsupport::fixture;
  using testsupport::read_file;
  int nmap = 0, nuclei = 0;
  for (const auto& o : testsupport::nmap_oracles()) {
    if (scan::parse_nmap_xml(read_file(fixture("nmap/" + o.fixture))) != o.expected)
      return fail(o.fixture + " differs from its expected record");
    ++nmap;
  }
  for (const auto& o : testsupport::nuclei_oracles()) {
    if (scan::parse_nuclei_jsonl(read_file(fixture("nuclei/" + o.fixture))) != o.expected)
      return fail(o.fixture + " differs from its expected findings");
    ++nuclei;
  }
  for (const auto& f : testsupport::nuclei_faults()) {
    try {
      scan::parse_nuclei_jsonl(read_file(fixture("nuclei/" + f.fixture)));
      return fail(f.fixture + " parsed without error");
    } catch (const scan::NucleiParseError& e) {
      if (e.line() != f.line) return fail(f.fixture + " error names line " + std::to_string(e.line()));
    }
  }
  std::string doc = read_file(fixture("nmap/webhost_sv_sc.xml"));
  std::string cut = doc.substr(0, doc.find("<runstats>"));
  std::string mismatched = "<nmaprun>\n<host>\n</hots>\n</nmaprun>";
  for (const auto& [text, offset] : {std::pair{cut, cut.size()}, std::pair{mismatched, mismatched.find("hots>")}}) {
    try {
      scan::parse_nmap_xml(text);
      return fail("malformed nmap XML parsed without error");
    } catch (const xml::ParseError& e) {
      if (e.offset() != offset) return fail("nmap error at byte " + std::to_string(e.offset()));
    }
  }
  return pass(std::to_string(nmap) + " nmap + " + std::to_string(nuclei) + " nuclei fixtures exact, 4 located errors");
}

Outcome msgpack_codec() {
  std::mt19937_64 rng(0xacce5);
  const int round_trips = 1000, comparisons = 100;
  for (int i = 0; i < round_trips; ++i) {
    msgpack::Value v = testsupport::random_value(rng, 0);
    std::string enc = msgpack::encode(v);
    if (msgpack::decode(enc) != v) return fail("round trip " + std::to_string(i) + " changed the value");
  }
  for (int i = 0; i < comparisons; ++i) {
    nlohmann::json j = testsupport::random_json(rng, 0, false);
    auto theirs = nlohmann::json::to_msgpack(j);
    std::string ours = msgpack::encode(msgpack::from_json(j));
    if (ours != std::string(theirs.begin(), theirs.end())) return fail("encodings differ for " + j.dump());
    if (msgpack::to_json(msgpack::decode(ours)) != j) return fail("decoding differs for " + j.dump());
  }
  return pass(std::to_string(round_trips) + " round trips, " + std::to_string(comparisons) +
              " byte-identical to nlohmann");
}

Outcome daemon_rules() {
  auto report = testsupport::run_daemon_sequences(500, 0xacce56);
  if (!report.violations.empty()) return fail(report.violations.front());
  if (report.sequences < 500) return fail("only " + std::to_string(report.sequences) + " sequences ran");
  return pass(std::to_string(report.sequences) + " sequences, " + std::to_string(report.sessions_opened) +
              " sessions, " + std::to_string(report.unknown_id_probes) + " unknown-id probes, " +
              std::to_string(report.interacts) + " interacts");
}

Outcome sanitizer() {
  for (const std::string opts : {"-sV -sC -p-", "-sS -sV -O", "-p445 --script smb-vuln-ms17-010,smb-protocols,smb"}) {
    auto r = scan::sanitize_options(opts, scan::ScannerKind::nmap);
    auto* tokens = std::get_if<std::vector<std::string>>(&r);
    if (!tokens || *tokens != testsupport::whitespace_split(opts)) return fail("'" + opts + "' not accepted verbatim");
  }
  std::mt19937 rng(0xacce57);
  const int strings = 10000;
  int rejected = 0;
  for (int i = 0; i < strings; ++i) {
    std::string opts = testsupport::random_options(rng);
    for (auto kind : {scan::ScannerKind::nmap, scan::ScannerKind::nuclei, scan::ScannerKind::curl}) {
      auto r = scan::sanitize_options(opts, kind);
      if (auto* tokens = std::get_if<std::vector<std::string>>(&r)) {
        for (const auto& t : *tokens) {
          if (testsupport::has_shell_meta(t)) return fail("accepted token with a metacharacter: '" + t + "'");
        }
      } else if (kind == scan::ScannerKind::nmap) {
        ++rejected;
      }
    }
  }
  return pass(std::to_string(strings) + " random strings, " + std::to_string(rejected) +
              " rejected, 3 documented strings verbatim");
}

Outcome interlock() {
  testsupport::TempDir dir;
  auto log = dir.path() / "spawns.log";
  auto script = dir.path() / "server.sh";
  testsupport::write_file(script, "#!/bin/sh\necho \"$1\" >> '" + log.string() + "'\nexec \"" +
                                      testsupport::tool("pentestmcp-").string() + "$1\" --backend mock --scenario '" +
                                      scenario_file("blue-0144").string() + "'\n");
  std::filesystem::permissions(script, std::filesystem::perms::owner_all);
  std::vector<std::string> argv = {testsupport::tool("pentestmcp-run").string(), "--plan", "plan-0144", "--backend",
                                   "real"};
  for (const char* name : {"nmap", "curl", "nuclei", "metasploit"}) {
    argv.push_back("--server-cmd");
    argv.push_back(std::string(name) + "=" + script.string() + " " + name);
  }
  auto r = run_process(argv, {}, std::chrono::seconds(10));
  if (r.timed_out) return fail("pentestmcp-run timed out");
  if (r.exit_code == 0) return fail("exited 0");
  if (std::filesystem::exists(log)) return fail("a server was spawned: " + testsupport::read_file(log));
  if (!r.out.empty()) return fail("a report was printed");
  return pass("exit " + std::to_string(r.exit_code) + ", 0 backend invocations");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "tools/list per server", std::chrono::seconds(5), tool_lists},
      {2, "struts kill chain", std::chrono::seconds(10), struts_chain},
      {3, "eternalblue kill chain", std::chrono::seconds(10), blue_chain},
      {4, "nmap and nuclei parsers", std::chrono::seconds(10), parsers},
      {5, "msgpack codec", std::chrono::seconds(10), msgpack_codec},
      {6, "daemon session rules", std::chrono::seconds(30), daemon_rules},
      {7, "option sanitizer", std::chrono::seconds(10), sanitizer},
      {8, "real backend interlock", std::chrono::seconds(10), interlock},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = fail(std::string("exception: ") + e.what());
    }
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
    if (!outcome.failure && elapsed > c.limit) {
      outcome.failure = "took " + std::to_string(elapsed.count()) + " ms, limit " + std::to_string(c.limit.count()) +
                        " ms";
    }
    bool ok = !outcome.failure;
    failures += ok ? 0 : 1;
    std::printf("%s criterion %d: %s (%s) [%lld ms, limit %lld ms]\n", ok ? "PASS" : "FAIL", c.number,
                c.title.c_str(), ok ? outcome.summary.c_str() : outcome.failure->c_str(),
                static_cast<long long>(elapsed.count()), static_cast<long long>(c.limit.count()));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
