// Independent checks for the option sanitizer, shared by the unit tests
// and the acceptance binary.
#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testsupport {


// Independent oracle: characters a POSIX shell would give meaning to, plus
// every control and non-ASCII byte.
inline bool has_shell_meta(const std::string& token) {
  static const std::string meta = ";&|`$()<>\\\"'*?[]{}~!#^ \t\n\r";
  for (unsigned char c : token) {
    if (c < 0x20 || c >= 0x7f) return true;
    if (meta.find(static_cast<char>(c)) != std::string::npos) return true;
  }
  return false;
}

inline std::vector<std::string> whitespace_split(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

inline std::string random_options(std::mt19937& rng) {
  static const std::vector<std::string> fragments = {
      "-sV", "-sC", "-p-", "-p445", "--script", "smb-vuln-ms17-010", "-O", "-T4", "--top-ports", "100",
      "-oX", "/tmp/x", "$(id)", "`id`", ";", "&&", "|", ">", "<", "'", "\"", "\\", "*", "?", "~",
      "{a,b}", "!", "#", "\n", "\t", " ", "%2f", "user@host", "a=b", "+x", "..", "-Pn", "\x01", "\x7f", "\xc3\xa9"};
  std::uniform_int_distribution<int> count(0, 8);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<std::size_t> pick(0, fragments.size() - 1);
  std::string out;
  int n = count(rng);
  for (int i = 0; i < n; ++i) {
    switch (rng() % 4) {
      case 0: out += static_cast<char>(byte(rng)); break;
      case 1: out += ' '; [[fallthrough]];
      default: out += fragments[pick(rng)]; break;
    }
  }
  return out;
}

}  // namespace testsupport
