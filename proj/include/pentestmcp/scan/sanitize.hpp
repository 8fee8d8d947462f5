#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pentestmcp::scan {

/// Which scanner the option string is destined for; decides the set of
/// output-redirection flags that are refused.
enum class ScannerKind { nmap, nuclei, curl };

struct OptionRejection {
  std::string token;
  std::string reason;
};

using SanitizeResult = std::variant<std::vector<std::string>, OptionRejection>;

/// True when every byte of `token` is in [A-Za-z0-9._,:/=+@%-].
bool is_safe_token(std::string_view token);

/// Splits on whitespace and admits only safe tokens. The first offending
/// token (metacharacter, control byte, or a flag that would make the tool
/// write files) is reported.
SanitizeResult sanitize_options(std::string_view options, ScannerKind scanner);

}  // namespace pentestmcp::scan
