// Locating shipped scenarios and plans.
#pragma once

#include <filesystem>
#include <string_view>

namespace pentestmcp {

/// Root holding scenarios/ and plans/: $PENTESTMCP_DATA_DIR when set,
/// otherwise the source tree the binaries were built from.
std::filesystem::path data_dir();

/// Resolves an explicit path, or a bare name looked up (with and without
/// ".json") under ./<subdir> and then <data_dir>/<subdir>. Throws
/// std::runtime_error when nothing matches.
std::filesystem::path resolve_data_file(std::string_view name_or_path, std::string_view subdir);

/// Directory of the running executable.
std::filesystem::path executable_dir();

}  // namespace pentestmcp
