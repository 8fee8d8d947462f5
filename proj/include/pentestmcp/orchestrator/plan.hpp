// Scripted kill-chain plans: steps, placeholders and value extraction.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace pentestmcp::orchestrator {

using json = nlohmann::json;
using Bindings = std::map<std::string, std::string>;

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BindSpec {
  std::string var;
  std::string pattern;  // ECMAScript regex with exactly one capture group
  friend bool operator==(const BindSpec&, const BindSpec&) = default;
};

struct PlanStep {
  std::string server;  // nmap | curl | nuclei | metasploit
  std::string tool;
  json arguments = json::object();
  std::vector<std::string> expect;
  std::vector<BindSpec> bind;
  bool expect_error = false;
  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct Plan {
  std::string name;
  std::string description;
  Bindings bindings;                 // defaults, overridable at run time
  std::vector<std::string> targets;  // may contain placeholders
  std::vector<PlanStep> steps;
};

inline const std::set<std::string> kKnownServers = {"nmap", "curl", "nuclei", "metasploit"};

/// Parses the plan format (JSON with comments). Throws PlanError.
Plan parse_plan(std::string_view text);
Plan load_plan(const std::filesystem::path& path);

/// Variable names referenced as ${name} or ${name:int} anywhere in the
/// value, including object keys.
std::set<std::string> placeholders(const json& value);
std::set<std::string> placeholders(std::string_view text);
inline std::set<std::string> placeholders(const std::string& text) { return placeholders(std::string_view(text)); }
inline std::set<std::string> placeholders(const char* text) { return placeholders(std::string_view(text)); }

/// Throws PlanError naming the first step (1-based) that references a
/// variable neither supplied in `initial` nor bound by an earlier step.
void check_closed(const Plan& plan, const Bindings& initial);

/// Replaces placeholders. A string that is exactly "${name:int}" becomes
/// an integer; other occurrences are spliced in as text. Throws PlanError
/// for unbound names or non-integer :int values.
json substitute(const json& value, const Bindings& bindings);
std::string substitute(std::string_view text, const Bindings& bindings);
inline std::string substitute(const std::string& text, const Bindings& bindings) {
  return substitute(std::string_view(text), bindings);
}
inline std::string substitute(const char* text, const Bindings& bindings) {
  return substitute(std::string_view(text), bindings);
}

/// First match of `pattern` in `text`, capture group 1. Throws PlanError
/// when the pattern is invalid or does not have exactly one group.
std::optional<std::string> extract_binding(const std::string& pattern, const std::string& text);

}  // namespace pentestmcp::orchestrator
