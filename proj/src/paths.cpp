#include "pentestmcp/paths.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace pentestmcp {

namespace fs = std::filesystem;

fs::path data_dir() {
  if (const char* env = std::getenv("PENTESTMCP_DATA_DIR"); env && *env) return env;
  return PENTESTMCP_SOURCE_DATA_DIR;
}

fs::path resolve_data_file(std::string_view name_or_path, std::string_view subdir) {
  fs::path given(name_or_path);
  std::error_code ec;
  if (fs::is_regular_file(given, ec)) return given;

  std::vector<fs::path> tried{given};
  for (const fs::path& root : {fs::current_path(ec) / subdir, data_dir() / subdir}) {
    for (const fs::path& candidate : {root / given, root / (std::string(name_or_path) + ".json")}) {
      if (fs::is_regular_file(candidate, ec)) return candidate;
      if (std::find(tried.begin(), tried.end(), candidate) == tried.end()) tried.push_back(candidate);
    }
  }
  std::string message = "cannot find '" + std::string(name_or_path) + "' (tried";
  for (const auto& p : tried) message += " " + p.string();
  throw std::runtime_error(message + ")");
}

fs::path executable_dir() {
  std::error_code ec;
  fs::path self = fs::read_symlink("/proc/self/exe", ec);
  return ec ? fs::current_path() : self.parent_path();
}

}  // namespace pentestmcp
