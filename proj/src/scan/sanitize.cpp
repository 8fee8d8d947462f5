#include "pentestmcp/scan/sanitize.hpp"

#include <algorithm>
#include <array>

namespace pentestmcp::scan {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool safe_char(char c) {
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) return true;
  switch (c) {
    case '.': case '_': case ',': case ':': case '/': case '=': case '+': case '@': case '%': case '-':
      return true;
    default:
      return false;
  }
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

/// Flags that would write scanner output to disk. nmap's short output flags
/// take their filename glued or separate, so match by prefix.
bool writes_files(std::string_view token, ScannerKind scanner) {
  switch (scanner) {
    case ScannerKind::nmap: {
      static constexpr std::array kPrefixes = {"-oN", "-oX", "-oG", "-oA", "-oS", "-oM", "--resume"};
      for (auto p : kPrefixes) {
        if (starts_with(token, p)) return true;
      }
      static constexpr std::array kExact = {"--append-output", "--stylesheet", "--webxml"};
      return std::find(kExact.begin(), kExact.end(), token) != kExact.end();
    }
    case ScannerKind::nuclei: {
      static constexpr std::array kFlags = {"-o", "-output", "-je", "-json-export", "-jle", "-jsonl-export",
                                            "-me", "-markdown-export", "-se", "-sarif-export", "-srd",
                                            "-store-resp-dir", "-sresp", "-store-resp"};
      std::string_view bare = token;
      if (starts_with(bare, "--")) bare.remove_prefix(1);
      auto eq = bare.find('=');
      if (eq != std::string_view::npos) bare = bare.substr(0, eq);
      return std::find(kFlags.begin(), kFlags.end(), bare) != kFlags.end();
    }
    case ScannerKind::curl: {
      // Short flags cluster ("-sSo"), so any file-writing letter in a
      // single-dash token counts.
      if (starts_with(token, "-") && !starts_with(token, "--")) {
        return token.find_first_of("oODcK") != std::string_view::npos;
      }
      static constexpr std::array kLong = {"--output", "--remote-name", "--remote-name-all", "--dump-header",
                                           "--cookie-jar", "--config", "--trace", "--trace-ascii",
                                           "--output-dir", "--libcurl", "--stderr", "--etag-save",
                                           "--hsts", "--alt-svc"};
      std::string_view bare = token.substr(0, token.find('='));
      return std::find(kLong.begin(), kLong.end(), bare) != kLong.end();
    }
  }
  return false;
}

}  // namespace

bool is_safe_token(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), safe_char);
}

SanitizeResult sanitize_options(std::string_view options, ScannerKind scanner) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < options.size()) {
    while (i < options.size() && is_space(options[i])) ++i;
    if (i == options.size()) break;
    std::size_t start = i;
    while (i < options.size() && !is_space(options[i])) ++i;
    std::string_view token = options.substr(start, i - start);
    if (!is_safe_token(token)) {
      return OptionRejection{std::string(token), "token contains a disallowed character"};
    }
    if (writes_files(token, scanner)) {
      return OptionRejection{std::string(token), "output-file flags are controlled by the server"};
    }
    tokens.emplace_back(token);
  }
  return tokens;
}

}  // namespace pentestmcp::scan
