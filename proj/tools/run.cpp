#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pentestmcp/orchestrator/interlock.hpp"
#include "pentestmcp/orchestrator/runner.hpp"
#include "pentestmcp/paths.hpp"

using namespace pentestmcp;
using namespace pentestmcp::orchestrator;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRefused = 3;
constexpr int kExitStartup = 4;

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

bool split_pair(const std::string& text, std::string& key, std::string& value) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) return false;
  key = text.substr(0, eq);
  value = text.substr(eq + 1);
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runs a scripted kill-chain plan against the PentestMCP servers"};
  app.name("pentestmcp-run");
  std::string plan_arg, scenario_arg, backend = "mock", report_format = "text", out_path, allowlist_path;
  std::vector<std::string> bind_args, server_cmds;
  bool authorized = false;
  int call_timeout = 900;
  app.add_option("--plan", plan_arg, "Plan file or shipped plan name")->required();
  app.add_option("--scenario", scenario_arg, "Scenario fixture for --backend mock (name or path)");
  app.add_option("--backend", backend, "Server backend")->check(CLI::IsMember({"mock", "real"}))->capture_default_str();
  app.add_option("--bind", bind_args, "Initial binding k=v (repeatable)");
  app.add_option("--report", report_format, "Report format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  app.add_flag("--i-have-authorization", authorized, "Confirm written authorization to test the plan targets");
  app.add_option("--allowlist", allowlist_path, "File of targets authorized for --backend real");
  app.add_option("--server-cmd", server_cmds, "Override a server command line: name='cmd args' (repeatable)");
  app.add_option("--call-timeout-secs", call_timeout, "Per tool call timeout")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  const std::string program = app.get_name();

  Plan plan;
  Bindings bindings;
  std::vector<std::string> targets;
  try {
    plan = load_plan(resolve_data_file(plan_arg, "plans"));
    Bindings overrides;
    for (const auto& b : bind_args) {
      std::string k, v;
      if (!split_pair(b, k, v)) throw PlanError("--bind expects k=v, got '" + b + "'");
      overrides[k] = v;
    }
    bindings = initial_bindings(plan, overrides);
    check_closed(plan, bindings);
    for (const auto& t : plan.targets) targets.push_back(substitute(t, bindings));
  } catch (const std::exception& e) {
    std::cerr << program << ": " << e.what() << "\n";
    return kExitUsage;
  }

  // Nothing may be spawned before this check.
  if (backend == "real") {
    std::optional<Allowlist> allowlist;
    if (!allowlist_path.empty()) {
      try {
        allowlist = load_allowlist(allowlist_path);
      } catch (const std::exception& e) {
        std::cerr << program << ": " << e.what() << "\n";
        return kExitRefused;
      }
    }
    if (auto refusal = refuse_real_backend(authorized, allowlist, targets)) {
      std::cerr << program << ": " << *refusal << "\n";
      return kExitRefused;
    }
  }

  ServerConfig config;
  std::string scenario_path;
  if (backend == "mock") {
    if (scenario_arg.empty()) {
      std::cerr << program << ": --backend mock needs --scenario\n";
      return kExitUsage;
    }
    try {
      scenario_path = std::filesystem::absolute(resolve_data_file(scenario_arg, "scenarios")).string();
    } catch (const std::exception& e) {
      std::cerr << program << ": " << e.what() << "\n";
      return kExitUsage;
    }
  }
  for (const std::string name : {"nmap", "curl", "nuclei", "metasploit"}) {
    std::vector<std::string> argv_for{(executable_dir() / ("pentestmcp-" + name)).string(), "--backend", backend};
    if (!scenario_path.empty()) {
      argv_for.push_back("--scenario");
      argv_for.push_back(scenario_path);
    }
    config[name] = argv_for;
  }
  for (const auto& s : server_cmds) {
    std::string name, cmd;
    if (!split_pair(s, name, cmd) || !kKnownServers.count(name) || split_words(cmd).empty()) {
      std::cerr << program << ": --server-cmd expects <nmap|curl|nuclei|metasploit>=<command>, got '" << s << "'\n";
      return kExitUsage;
    }
    config[name] = split_words(cmd);
  }

  ServerHandles servers;
  try {
    servers = spawn_servers(config, std::chrono::seconds(call_timeout));
  } catch (const StartupError& e) {
    std::cerr << program << ": " << e.what() << "\n";
    return kExitStartup;
  }

  TraceReport report = run_plan(plan, bindings, make_caller(servers));
  std::string rendered =
      render_report(report, report_format == "structured" ? ReportFormat::structured : ReportFormat::text);
  if (out_path.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!(out << rendered)) {
      std::cerr << program << ": cannot write " << out_path << "\n";
      return kExitFailed;
    }
  }
  return report.completed() ? 0 : kExitFailed;
}
