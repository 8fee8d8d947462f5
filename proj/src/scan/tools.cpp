#include "pentestmcp/scan/tools.hpp"

#include <algorithm>

#include "pentestmcp/scan/nmap.hpp"
#include "pentestmcp/scan/nuclei.hpp"
#include "pentestmcp/scan/sanitize.hpp"
#include "pentestmcp/scan/xml.hpp"

namespace pentestmcp::scan {

namespace {

using mcp::json;
using mcp::PropertyType;
using mcp::ToolCallResult;

std::string failure_text(const std::string& tool, const ProcessOutput& out) {
  std::string text = tool + " failed";
  if (out.timed_out) {
    text += " (timed out)";
  } else {
    text += " (exit code " + std::to_string(out.exit_code) + ")";
  }
  if (!out.err.empty()) text += ": " + out.err;
  return text;
}

std::string rejection_text(const OptionRejection& r) {
  return "rejected option token '" + r.token + "': " + r.reason;
}

bool valid_method(const std::string& method) {
  return !method.empty() && method.size() <= 16 &&
         std::all_of(method.begin(), method.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

bool valid_header(const std::string& header) {
  if (header.find(':') == std::string::npos || header.front() == ':' || header.front() == '-') return false;
  return std::none_of(header.begin(), header.end(), [](char c) { return c == '\r' || c == '\n' || c == '\0'; });
}

/// Comma-separated list whose elements all satisfy `element_ok`.
template <typename Pred>
bool valid_list(const std::string& list, Pred element_ok) {
  if (list.empty()) return false;
  std::size_t start = 0;
  while (true) {
    auto comma = list.find(',', start);
    auto item = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item.empty() || !element_ok(item)) return false;
    if (comma == std::string::npos) return true;
    start = comma + 1;
  }
}

std::optional<std::string> optional_string(const json& args, const char* key) {
  auto it = args.find(key);
  if (it == args.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

std::vector<std::string> nmap_argv(const TargetSpec& target, const std::vector<std::string>& options) {
  std::vector<std::string> argv{"nmap"};
  argv.insert(argv.end(), options.begin(), options.end());
  argv.insert(argv.end(), {"-oX", "-", target.value});
  return argv;
}

ToolCallResult nmap_scan(ExecBackend& backend, const std::string& target, const std::string& options,
                         std::chrono::seconds timeout) {
  auto spec = parse_target(target);
  if (!spec) return ToolCallResult::error("invalid target '" + target + "'");
  auto sanitized = sanitize_options(options, ScannerKind::nmap);
  if (auto* rejection = std::get_if<OptionRejection>(&sanitized)) {
    return ToolCallResult::error(rejection_text(*rejection));
  }
  auto out = backend.run(nmap_argv(*spec, std::get<std::vector<std::string>>(sanitized)), {}, timeout);
  if (out.exit_code != 0 || out.timed_out) return ToolCallResult::error(failure_text("nmap", out));
  try {
    NmapRun run = parse_nmap_xml(out.out);
    return ToolCallResult::ok(render_nmap_text(run), to_json(run));
  } catch (const std::exception& e) {
    return ToolCallResult::error(std::string("could not parse nmap output: ") + e.what());
  }
}

std::vector<std::string> curl_argv(const CurlRequest& request, const std::vector<std::string>& options,
                                   std::chrono::seconds timeout) {
  std::vector<std::string> argv{"curl", "-i", "-s", "-S", "--max-time", std::to_string(timeout.count()),
                                "-X", request.method};
  for (const auto& h : request.headers) argv.insert(argv.end(), {"-H", h});
  if (request.body) argv.insert(argv.end(), {"--data-binary", "@-"});
  argv.insert(argv.end(), options.begin(), options.end());
  argv.push_back(request.url);
  return argv;
}

ToolCallResult curl_request(ExecBackend& backend, const CurlRequest& request, std::chrono::seconds timeout) {
  auto url = parse_http_url(request.url);
  if (!url) {
    bool other_scheme = request.url.find("://") != std::string::npos;
    return ToolCallResult::error(other_scheme ? "unsupported scheme in '" + request.url + "' (http/https only)"
                                              : "invalid url '" + request.url + "'");
  }
  if (!valid_method(request.method)) return ToolCallResult::error("invalid method '" + request.method + "'");
  for (const auto& h : request.headers) {
    if (!valid_header(h)) return ToolCallResult::error("invalid header '" + h + "'");
  }
  auto sanitized = sanitize_options(request.options, ScannerKind::curl);
  if (auto* rejection = std::get_if<OptionRejection>(&sanitized)) {
    return ToolCallResult::error(rejection_text(*rejection));
  }
  // The process deadline sits just past curl's own --max-time.
  auto out = backend.run(curl_argv(request, std::get<std::vector<std::string>>(sanitized), timeout),
                         request.body.value_or(""), timeout + std::chrono::seconds(5));
  if (out.exit_code != 0 || out.timed_out) return ToolCallResult::error(failure_text("curl", out));
  return ToolCallResult::ok(out.out);
}

std::vector<std::string> nuclei_argv(const TargetSpec& target, const NucleiFilters& filters) {
  std::vector<std::string> argv{"nuclei", "-u", target.value, "-jsonl", "-silent", "-nc", "-duc"};
  if (filters.severity) argv.insert(argv.end(), {"-severity", *filters.severity});
  if (filters.templates) argv.insert(argv.end(), {"-id", *filters.templates});
  return argv;
}

ToolCallResult nuclei_scan(ExecBackend& backend, const std::string& target, const NucleiFilters& filters,
                           std::chrono::seconds timeout) {
  auto spec = parse_target(target, /*allow_url=*/true);
  if (!spec) return ToolCallResult::error("invalid target '" + target + "'");
  if (filters.severity &&
      !valid_list(*filters.severity, [](const std::string& s) { return parse_severity(s).has_value(); })) {
    return ToolCallResult::error("invalid severity filter '" + *filters.severity + "'");
  }
  if (filters.templates && !valid_list(*filters.templates, [](const std::string& s) { return is_safe_token(s); })) {
    return ToolCallResult::error("invalid templates filter '" + *filters.templates + "'");
  }
  auto out = backend.run(nuclei_argv(*spec, filters), {}, timeout);
  if (out.exit_code != 0 || out.timed_out) return ToolCallResult::error(failure_text("nuclei", out));
  try {
    auto findings = parse_nuclei_jsonl(out.out);
    json structured = json::array();
    for (const auto& f : findings) structured.push_back(to_jsonl_record(f));
    return ToolCallResult::ok(render_findings(findings), json{{"findings", std::move(structured)}});
  } catch (const NucleiParseError& e) {
    return ToolCallResult::error(std::string("could not parse nuclei output: ") + e.what());
  }
}

mcp::ToolDescriptor nmap_scan_descriptor() {
  return {"nmap_scan",
          "Scan a host or network with nmap to discover open ports, running services and their versions. "
          "Parameters: target (IPv4/IPv6 address, hostname or CIDR range) and options (nmap command-line "
          "flags such as '-sV -sC -p-'; shell metacharacters and output-file flags are rejected). Returns "
          "one line per port in the form '<port>/<proto> <state> <service> <version>', followed by NSE "
          "script results, plus the same data as structured content.",
          {{{"target", PropertyType::string, "Host, address or CIDR range to scan", true},
            {"options", PropertyType::string, "nmap flags, whitespace separated", false}}}};
}

mcp::ToolDescriptor curl_request_descriptor() {
  return {"curl_request",
          "Send an HTTP(S) request with curl to enumerate web resources. Parameters: url (http or https), "
          "method (default GET), headers (list of 'Name: value' strings), body (request body) and options "
          "(extra curl flags). Returns the raw response: status line, headers and body. Non-2xx statuses "
          "are returned as normal results.",
          {{{"url", PropertyType::string, "http:// or https:// URL", true},
            {"method", PropertyType::string, "HTTP method, e.g. GET or POST", false},
            {"headers", PropertyType::array, "Request headers as 'Name: value' strings", false},
            {"body", PropertyType::string, "Request body", false},
            {"options", PropertyType::string, "Extra curl flags, whitespace separated", false}}}};
}

mcp::ToolDescriptor nuclei_scan_descriptor() {
  return {"nuclei_scan",
          "Run the nuclei vulnerability scanner against a target to find known vulnerabilities (CVEs, "
          "misconfigurations). Parameters: target (address, hostname or URL), severity (optional comma "
          "list: info,low,medium,high,critical) and templates (optional comma list of template ids). "
          "Returns one finding per line as '[<template-id>] [<severity>] <matched-at>', or 'no findings'.",
          {{{"target", PropertyType::string, "Address, hostname or URL to scan", true},
            {"severity", PropertyType::string, "Comma-separated severity filter", false},
            {"templates", PropertyType::string, "Comma-separated template id filter", false}}}};
}

mcp::ToolServer make_nmap_server(std::shared_ptr<ExecBackend> backend, std::chrono::seconds timeout) {
  mcp::ToolHandler handler = [backend, timeout](const json& args) {
    return nmap_scan(*backend, args.at("target").get<std::string>(),
                     optional_string(args, "options").value_or(""), timeout);
  };
  return mcp::ToolServer({"pentestmcp-nmap", kServerVersion}, {{nmap_scan_descriptor(), handler}});
}

mcp::ToolServer make_curl_server(std::shared_ptr<ExecBackend> backend, std::chrono::seconds timeout) {
  mcp::ToolHandler handler = [backend, timeout](const json& args) {
    CurlRequest request;
    request.url = args.at("url").get<std::string>();
    request.method = optional_string(args, "method").value_or("GET");
    if (auto it = args.find("headers"); it != args.end()) {
      for (const auto& h : *it) {
        if (!h.is_string()) return ToolCallResult::error("headers must be strings");
        request.headers.push_back(h.get<std::string>());
      }
    }
    request.body = optional_string(args, "body");
    request.options = optional_string(args, "options").value_or("");
    return curl_request(*backend, request, timeout);
  };
  return mcp::ToolServer({"pentestmcp-curl", kServerVersion}, {{curl_request_descriptor(), handler}});
}

mcp::ToolServer make_nuclei_server(std::shared_ptr<ExecBackend> backend, std::chrono::seconds timeout) {
  mcp::ToolHandler handler = [backend, timeout](const json& args) {
    NucleiFilters filters{optional_string(args, "severity"), optional_string(args, "templates")};
    return nuclei_scan(*backend, args.at("target").get<std::string>(), filters, timeout);
  };
  return mcp::ToolServer({"pentestmcp-nuclei", kServerVersion}, {{nuclei_scan_descriptor(), handler}});
}

}  // namespace pentestmcp::scan
