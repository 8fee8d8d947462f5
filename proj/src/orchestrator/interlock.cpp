#include "pentestmcp/orchestrator/interlock.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pentestmcp/scan/target.hpp"

namespace pentestmcp::orchestrator {

namespace {

std::string host_of(std::string_view target) {
  if (auto url = scan::parse_http_url(target)) return url->host;
  return std::string(target);
}

}  // namespace

bool Allowlist::permits(std::string_view target) const {
  std::string host = host_of(target);
  for (const auto& e : entries) {
    if (e == target || e == host) return true;
    if (scan::is_cidr(e) && scan::cidr_contains(e, host)) return true;
  }
  return false;
}

Allowlist parse_allowlist(std::string_view text) {
  Allowlist list;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    list.entries.push_back(line.substr(first, last - first + 1));
  }
  return list;
}

Allowlist load_allowlist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read allowlist " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_allowlist(buf.str());
}

std::optional<std::string> refuse_real_backend(bool authorized, const std::optional<Allowlist>& allowlist,
                                               const std::vector<std::string>& targets) {
  if (!authorized) return "refusing --backend real without --i-have-authorization";
  if (!allowlist) return "refusing --backend real without --allowlist";
  if (targets.empty()) return "refusing --backend real: the plan declares no targets";
  for (const auto& t : targets) {
    if (!allowlist->permits(t)) return "refusing --backend real: target '" + t + "' is not in the allowlist";
  }
  return std::nullopt;
}

}  // namespace pentestmcp::orchestrator
