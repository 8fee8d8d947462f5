#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pentestmcp::scan {

enum class Severity { info, low, medium, high, critical };

std::string_view to_string(Severity severity);
/// Case-insensitive.
std::optional<Severity> parse_severity(std::string_view text);

struct VulnFinding {
  std::string template_id;
  Severity severity = Severity::info;
  std::string matched_at;

  friend bool operator==(const VulnFinding&, const VulnFinding&) = default;
};

class NucleiParseError : public std::runtime_error {
 public:
  NucleiParseError(std::size_t line, const std::string& what)
      : std::runtime_error("nuclei output line " + std::to_string(line) + ": " + what), line_(line) {}

  /// 1-based line number of the offending record.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Reads nuclei -jsonl output. Blank lines are skipped; order is kept.
std::vector<VulnFinding> parse_nuclei_jsonl(std::string_view lines);

/// One JSONL record in the shape nuclei emits (template-id, info.severity,
/// matched-at, host).
nlohmann::json to_jsonl_record(const VulnFinding& finding);

/// "[<template-id>] [<severity>] <matched-at>"
std::string render_finding(const VulnFinding& finding);

/// One rendered line per finding, or "no findings".
std::string render_findings(const std::vector<VulnFinding>& findings);

}  // namespace pentestmcp::scan
