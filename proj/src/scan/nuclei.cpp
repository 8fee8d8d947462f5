#include "pentestmcp/scan/nuclei.hpp"

#include <algorithm>
#include <cctype>

#include "pentestmcp/scan/target.hpp"

namespace pentestmcp::scan {

namespace {

using nlohmann::json;

const json* find_string(const json& object, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    auto it = object.find(key);
    if (it != object.end() && it->is_string()) return &*it;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::info: return "info";
    case Severity::low: return "low";
    case Severity::medium: return "medium";
    case Severity::high: return "high";
    case Severity::critical: return "critical";
  }
  return "unknown";
}

std::optional<Severity> parse_severity(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto s : {Severity::info, Severity::low, Severity::medium, Severity::high, Severity::critical}) {
    if (to_string(s) == lower) return s;
  }
  return std::nullopt;
}

std::vector<VulnFinding> parse_nuclei_jsonl(std::string_view input) {
  std::vector<VulnFinding> findings;
  std::size_t line_no = 0;
  while (!input.empty()) {
    ++line_no;
    auto nl = input.find('\n');
    std::string_view line = input.substr(0, nl);
    input = nl == std::string_view::npos ? std::string_view{} : input.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    json record = json::parse(line.begin(), line.end(), nullptr, false);
    if (record.is_discarded() || !record.is_object()) throw NucleiParseError(line_no, "not a JSON object");

    VulnFinding finding;
    const json* id = find_string(record, {"template-id", "templateID"});
    if (!id) throw NucleiParseError(line_no, "missing template-id");
    finding.template_id = id->get<std::string>();

    const json* severity = nullptr;
    if (auto info = record.find("info"); info != record.end() && info->is_object()) {
      severity = find_string(*info, {"severity"});
    }
    if (!severity) throw NucleiParseError(line_no, "missing severity");
    auto level = parse_severity(severity->get<std::string>());
    if (!level) throw NucleiParseError(line_no, "unknown severity '" + severity->get<std::string>() + "'");
    finding.severity = *level;

    const json* matched = find_string(record, {"matched-at", "matched", "host"});
    if (!matched) throw NucleiParseError(line_no, "missing matched-at");
    finding.matched_at = matched->get<std::string>();
    findings.push_back(std::move(finding));
  }
  return findings;
}

nlohmann::json to_jsonl_record(const VulnFinding& finding) {
  std::string host = finding.matched_at;
  if (auto url = parse_http_url(finding.matched_at)) host = url->host;
  return {{"template-id", finding.template_id},
          {"info", {{"name", finding.template_id}, {"severity", to_string(finding.severity)}}},
          {"type", "http"},
          {"host", host},
          {"matched-at", finding.matched_at}};
}

std::string render_finding(const VulnFinding& finding) {
  return "[" + finding.template_id + "] [" + std::string(to_string(finding.severity)) + "] " + finding.matched_at;
}

std::string render_findings(const std::vector<VulnFinding>& findings) {
  if (findings.empty()) return "no findings";
  std::string out;
  for (const auto& f : findings) {
    if (!out.empty()) out += '\n';
    out += render_finding(f);
  }
  return out;
}

}  // namespace pentestmcp::scan
