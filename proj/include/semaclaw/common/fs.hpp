#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace semaclaw::fsutil {

namespace fs = std::filesystem;

/// Reads a whole file. Throws Errc::io naming the path.
std::string read_file(const fs::path& path);
std::optional<std::string> try_read_file(const fs::path& path);

/// Writes to a sibling temp file and renames over the target, so readers see
/// either the old or the new content, never a partial one.
void atomic_write(const fs::path& path, std::string_view content);

void append_file(const fs::path& path, std::string_view content);

/// Lexically normalizes `rel` against `root` and rejects anything that would
/// escape it (absolute paths, `..` segments that climb out).
fs::path resolve_inside(const fs::path& root, const fs::path& rel);

bool is_inside(const fs::path& root, const fs::path& candidate);

}  // namespace semaclaw::fsutil
