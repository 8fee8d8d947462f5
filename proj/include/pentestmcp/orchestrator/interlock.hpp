// Guard in front of the real scanner/exploit backend.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pentestmcp::orchestrator {

/// Targets the operator is authorized to test: one IP, CIDR, hostname or
/// URL per line, '#' starts a comment.
struct Allowlist {
  std::vector<std::string> entries;

  /// Exact match, CIDR containment, or a URL whose host matches.
  bool permits(std::string_view target) const;
};

/// Throws std::runtime_error when the file cannot be read.
Allowlist load_allowlist(const std::filesystem::path& path);
Allowlist parse_allowlist(std::string_view text);

/// nullopt when a real-backend run may proceed, otherwise the refusal.
std::optional<std::string> refuse_real_backend(bool authorized, const std::optional<Allowlist>& allowlist,
                                               const std::vector<std::string>& targets);

}  // namespace pentestmcp::orchestrator
