#include "pentestmcp/scan/target.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <array>
#include <charconv>

namespace pentestmcp::scan {

namespace {

bool parse_int(std::string_view text, int& out) {
  if (text.empty() || text.size() > 5) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool url_safe(char c) {
  // RFC 3986 characters minus shell metacharacters (encode & ; ! as %XX).
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) return true;
  return std::string_view("-._~:/?#[]@+,=%").find(c) != std::string_view::npos;
}

}  // namespace

bool is_ipv4(std::string_view text) {
  if (text.empty() || text.size() > 15) return false;
  std::string s(text);
  in_addr addr{};
  return ::inet_pton(AF_INET, s.c_str(), &addr) == 1;
}

bool is_ipv6(std::string_view text) {
  if (text.empty() || text.size() > 45 || text.find(':') == std::string_view::npos) return false;
  std::string s(text);
  in6_addr addr{};
  return ::inet_pton(AF_INET6, s.c_str(), &addr) == 1;
}

bool is_hostname(std::string_view text) {
  if (text.empty() || text.size() > 253) return false;
  std::size_t start = 0;
  bool all_numeric = true;
  while (start <= text.size()) {
    auto dot = text.find('.', start);
    auto label = text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (label.empty() || label.size() > 63) return false;
    if (label.front() == '-' || label.back() == '-') return false;
    for (char c : label) {
      bool alpha = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
      bool digit = c >= '0' && c <= '9';
      if (!alpha && !digit && c != '-') return false;
      if (!digit) all_numeric = false;
    }
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  // Dotted all-numeric strings are malformed IPv4, not hostnames.
  return !all_numeric;
}

bool is_cidr(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return false;
  auto addr = text.substr(0, slash);
  int prefix = -1;
  if (!parse_int(text.substr(slash + 1), prefix)) return false;
  if (is_ipv4(addr)) return prefix >= 0 && prefix <= 32;
  if (is_ipv6(addr)) return prefix >= 0 && prefix <= 128;
  return false;
}

bool cidr_contains(std::string_view cidr, std::string_view address) {
  if (!is_cidr(cidr)) return false;
  auto slash = cidr.find('/');
  std::string net(cidr.substr(0, slash));
  std::string addr(address);
  int bits = 0;
  parse_int(cidr.substr(slash + 1), bits);
  int family = is_ipv4(net) ? AF_INET : AF_INET6;
  std::array<unsigned char, 16> a{}, n{};
  if (inet_pton(family, addr.c_str(), a.data()) != 1 || inet_pton(family, net.c_str(), n.data()) != 1) return false;
  for (int i = 0; i < bits; ++i) {
    int byte = i / 8, bit = 7 - i % 8;
    if (((a[byte] >> bit) & 1) != ((n[byte] >> bit) & 1)) return false;
  }
  return true;
}

std::optional<ParsedUrl> parse_http_url(std::string_view text) {
  ParsedUrl url;
  auto sep = text.find("://");
  if (sep == std::string_view::npos) return std::nullopt;
  url.scheme = std::string(text.substr(0, sep));
  std::transform(url.scheme.begin(), url.scheme.end(), url.scheme.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (url.scheme != "http" && url.scheme != "https") return std::nullopt;
  if (!std::all_of(text.begin(), text.end(), url_safe)) return std::nullopt;

  auto rest = text.substr(sep + 3);
  auto path_start = rest.find_first_of("/?#");
  auto authority = rest.substr(0, path_start);
  url.path = path_start == std::string_view::npos ? "/" : std::string(rest.substr(path_start));
  if (url.path.front() != '/') url.path.insert(url.path.begin(), '/');
  if (authority.find('@') != std::string_view::npos) return std::nullopt;

  std::string_view host = authority;
  std::string_view port;
  if (!authority.empty() && authority.front() == '[') {
    auto close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    host = authority.substr(1, close - 1);
    auto tail = authority.substr(close + 1);
    if (!tail.empty()) {
      if (tail.front() != ':') return std::nullopt;
      port = tail.substr(1);
    }
    if (!is_ipv6(host)) return std::nullopt;
  } else {
    auto colon = authority.find(':');
    if (colon != std::string_view::npos) {
      host = authority.substr(0, colon);
      port = authority.substr(colon + 1);
    }
    if (!is_ipv4(host) && !is_hostname(host)) return std::nullopt;
  }
  url.host = std::string(host);
  url.port = url.scheme == "https" ? 443 : 80;
  if (!port.empty()) {
    int p = 0;
    if (!parse_int(port, p) || p < 1 || p > 65535) return std::nullopt;
    url.port = p;
  }
  return url;
}

std::optional<TargetSpec> parse_target(std::string_view text, bool allow_url) {
  if (text.empty()) return std::nullopt;
  TargetSpec t{std::string(text), TargetKind::hostname};
  if (is_ipv4(text)) {
    t.kind = TargetKind::ipv4;
  } else if (is_ipv6(text)) {
    t.kind = TargetKind::ipv6;
  } else if (is_cidr(text)) {
    t.kind = TargetKind::cidr;
  } else if (text.find("://") != std::string_view::npos) {
    if (!allow_url || !parse_http_url(text)) return std::nullopt;
    t.kind = TargetKind::url;
  } else if (is_hostname(text)) {
    t.kind = TargetKind::hostname;
  } else {
    return std::nullopt;
  }
  return t;
}

std::string TargetSpec::host() const {
  switch (kind) {
    case TargetKind::cidr:
      return value.substr(0, value.find('/'));
    case TargetKind::url:
      if (auto url = parse_http_url(value)) return url->host;
      return {};
    default:
      return value;
  }
}

}  // namespace pentestmcp::scan
