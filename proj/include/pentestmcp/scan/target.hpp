#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace pentestmcp::scan {

enum class TargetKind { ipv4, ipv6, hostname, cidr, url };

/// A validated scan target. Construct through parse_target.
struct TargetSpec {
  std::string value;
  TargetKind kind = TargetKind::hostname;

  /// Host part: the address/hostname itself, the network address of a CIDR,
  /// or the authority host of a URL (brackets stripped for IPv6).
  std::string host() const;

  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;  // always begins with '/'
};

bool is_ipv4(std::string_view text);
bool is_ipv6(std::string_view text);
bool is_hostname(std::string_view text);
bool is_cidr(std::string_view text);

/// True when `address` lies inside the network `cidr` (same family).
bool cidr_contains(std::string_view cidr, std::string_view address);

/// Splits an http(s) URL. Returns nullopt for other schemes or bad syntax.
std::optional<ParsedUrl> parse_http_url(std::string_view text);

/// Accepts exactly one of the admitted syntaxes. URLs are only admitted
/// when `allow_url` is set. Returns nullopt for anything else, including
/// values with whitespace or shell metacharacters.
std::optional<TargetSpec> parse_target(std::string_view text, bool allow_url = false);

}  // namespace pentestmcp::scan
