#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

namespace proposalbench {

/// Writes through a temporary sibling file and renames it into place. If
/// `writer` throws or the stream fails, the temporary is removed and `path`
/// is left untouched.
void atomic_write(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace proposalbench
