// Plan execution and trace reports.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pentestmcp/mcp/server.hpp"
#include "pentestmcp/orchestrator/client.hpp"
#include "pentestmcp/orchestrator/plan.hpp"

namespace pentestmcp::orchestrator {

enum class StepStatus { pass, expectation_failed, tool_error };

std::string_view to_string(StepStatus status);
std::optional<StepStatus> parse_step_status(std::string_view text);

struct TraceRecord {
  int step = 0;  // 1-based, contiguous
  std::string server;
  std::string tool;
  json arguments;  // after substitution
  std::string response;
  bool is_error = false;
  StepStatus status = StepStatus::pass;
  std::string detail;  // why the step failed, empty on pass
  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct TraceReport {
  std::string plan;
  std::vector<TraceRecord> records;
  int tool_call_count = 0;
  std::optional<int> failed_step;

  bool completed() const { return !failed_step.has_value(); }
  /// "completed" or "failed-at-step N".
  std::string outcome() const;
  friend bool operator==(const TraceReport&, const TraceReport&) = default;
};

/// Performs one tool call. Throws McpError when the server is unreachable.
using ToolCaller = std::function<mcp::ToolCallResult(const std::string& server, const std::string& tool,
                                                     const json& arguments)>;

/// Caller backed by connected server handles.
ToolCaller make_caller(ServerHandles& servers);

/// Bindings the plan starts with: its defaults overridden by `overrides`.
Bindings initial_bindings(const Plan& plan, const Bindings& overrides);

/// Runs the steps in order and stops at the first failing one. Throws
/// PlanError before any call when a placeholder cannot be resolved.
TraceReport run_plan(const Plan& plan, const Bindings& bindings, const ToolCaller& call);

enum class ReportFormat { text, structured };

std::string render_report(const TraceReport& report, ReportFormat format);

/// Inverse of the structured rendering. Throws PlanError.
TraceReport parse_report(std::string_view structured);

}  // namespace pentestmcp::orchestrator
