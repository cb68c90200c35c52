#pragma once

#include <string>
#include <string_view>

namespace rxprobe::io {

// Writes `contents` to a sibling temp file, flushes it, then renames it over
// `path`, so readers see either the old file or the complete new one.
// Missing parent directories are created.
void write_file_atomic(const std::string& path, std::string_view contents);

std::string read_file(const std::string& path);

}  // namespace rxprobe::io
