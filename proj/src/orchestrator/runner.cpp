#include "pentestmcp/orchestrator/runner.hpp"

#include <sstream>

namespace pentestmcp::orchestrator {

std::string_view to_string(StepStatus status) {
  switch (status) {
    case StepStatus::pass: return "pass";
    case StepStatus::expectation_failed: return "expectation-failed";
    case StepStatus::tool_error: return "tool-error";
  }
  return "tool-error";
}

std::optional<StepStatus> parse_step_status(std::string_view text) {
  for (auto s : {StepStatus::pass, StepStatus::expectation_failed, StepStatus::tool_error}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::string TraceReport::outcome() const {
  return failed_step ? "failed-at-step " + std::to_string(*failed_step) : "completed";
}

ToolCaller make_caller(ServerHandles& servers) {
  return [&servers](const std::string& server, const std::string& tool, const json& arguments) {
    auto it = servers.find(server);
    if (it == servers.end() || !it->second) throw McpError("no connection to server '" + server + "'");
    return it->second->call_tool(tool, arguments);
  };
}

Bindings initial_bindings(const Plan& plan, const Bindings& overrides) {
  Bindings out = plan.bindings;
  for (const auto& [k, v] : overrides) out[k] = v;
  return out;
}

TraceReport run_plan(const Plan& plan, const Bindings& initial, const ToolCaller& call) {
  check_closed(plan, initial);
  Bindings bindings = initial;
  TraceReport report;
  report.plan = plan.name;

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& step = plan.steps[i];
    TraceRecord rec;
    rec.step = static_cast<int>(i + 1);
    rec.server = step.server;
    rec.tool = step.tool;

    auto finish = [&](StepStatus status, std::string detail) {
      rec.status = status;
      rec.detail = std::move(detail);
      report.records.push_back(rec);
      report.tool_call_count = static_cast<int>(report.records.size());
      if (status != StepStatus::pass) report.failed_step = rec.step;
      return status == StepStatus::pass;
    };

    try {
      rec.arguments = substitute(step.arguments, bindings);
    } catch (const PlanError& e) {
      rec.arguments = step.arguments;
      finish(StepStatus::expectation_failed, e.what());
      break;
    }

    try {
      mcp::ToolCallResult result = call(step.server, step.tool, rec.arguments);
      rec.response = result.text();
      rec.is_error = result.is_error;
    } catch (const McpError& e) {
      rec.response = e.what();
      rec.is_error = true;
      finish(StepStatus::tool_error, e.what());
      break;
    }

    if (rec.is_error != step.expect_error) {
      if (step.expect_error) {
        finish(StepStatus::expectation_failed, "expected an error result");
      } else {
        finish(StepStatus::tool_error, "tool returned an error");
      }
      break;
    }

    std::string missing;
    for (const auto& e : step.expect) {
      std::string needle = substitute(std::string_view(e), bindings);
      if (rec.response.find(needle) == std::string::npos) {
        missing = needle;
        break;
      }
    }
    if (!missing.empty()) {
      finish(StepStatus::expectation_failed, "response lacks '" + missing + "'");
      break;
    }

    std::string unbound;
    for (const auto& b : step.bind) {
      auto value = extract_binding(b.pattern, rec.response);
      if (!value) {
        unbound = b.var;
        break;
      }
      bindings[b.var] = *value;
    }
    if (!unbound.empty()) {
      finish(StepStatus::expectation_failed, "no value for '" + unbound + "' in response");
      break;
    }
    finish(StepStatus::pass, "");
  }
  report.tool_call_count = static_cast<int>(report.records.size());
  return report;
}

std::string render_report(const TraceReport& report, ReportFormat format) {
  if (format == ReportFormat::structured) {
    nlohmann::ordered_json j;
    j["plan"] = report.plan;
    j["outcome"] = report.outcome();
    j["tool_call_count"] = report.tool_call_count;
    j["records"] = nlohmann::ordered_json::array();
    for (const auto& r : report.records) {
      nlohmann::ordered_json rec;
      rec["step"] = r.step;
      rec["server"] = r.server;
      rec["tool"] = r.tool;
      rec["arguments"] = r.arguments;
      rec["status"] = to_string(r.status);
      rec["is_error"] = r.is_error;
      if (!r.detail.empty()) rec["detail"] = r.detail;
      rec["response"] = r.response;
      j["records"].push_back(std::move(rec));
    }
    return j.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "Plan: " << report.plan << "\n\n";
  for (const auto& r : report.records) {
    out << "Step " << r.step << "\n";
    out << "  Tool call: " << r.tool << "(" << r.arguments.dump() << ") via " << r.server << "\n";
    out << "  Status: " << to_string(r.status);
    if (!r.detail.empty()) out << " (" << r.detail << ")";
    out << "\n  Response:" << (r.is_error ? " [error]" : "") << "\n";
    std::istringstream lines(r.response);
    for (std::string line; std::getline(lines, line);) out << "    " << line << "\n";
    out << "\n";
  }
  out << "tool calls: " << report.tool_call_count << "\n";
  out << "outcome: " << report.outcome() << "\n";
  return out.str();
}

TraceReport parse_report(std::string_view structured) {
  json j;
  try {
    j = json::parse(structured);
  } catch (const json::parse_error& e) {
    throw PlanError(std::string("report is not valid JSON: ") + e.what());
  }
  TraceReport report;
  try {
    report.plan = j.at("plan").get<std::string>();
    report.tool_call_count = j.at("tool_call_count").get<int>();
    std::string outcome = j.at("outcome").get<std::string>();
    const std::string prefix = "failed-at-step ";
    if (outcome.rfind(prefix, 0) == 0) {
      report.failed_step = std::stoi(outcome.substr(prefix.size()));
    } else if (outcome != "completed") {
      throw PlanError("unknown outcome '" + outcome + "'");
    }
    for (const auto& r : j.at("records")) {
      TraceRecord rec;
      rec.step = r.at("step").get<int>();
      rec.server = r.at("server").get<std::string>();
      rec.tool = r.at("tool").get<std::string>();
      rec.arguments = r.at("arguments");
      auto status = parse_step_status(r.at("status").get<std::string>());
      if (!status) throw PlanError("unknown step status");
      rec.status = *status;
      rec.is_error = r.at("is_error").get<bool>();
      rec.detail = r.value("detail", "");
      rec.response = r.at("response").get<std::string>();
      report.records.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw PlanError(std::string("malformed report: ") + e.what());
  } catch (const std::logic_error& e) {
    throw PlanError(std::string("malformed report: ") + e.what());
  }
  return report;
}

}  // namespace pentestmcp::orchestrator
