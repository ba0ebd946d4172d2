#pragma once

#include <string>
#include <string_view>

namespace helt::harness {

std::string sha256_hex(std::string_view bytes);

// Throws ConfigError if the file cannot be read.
std::string read_file(const std::string& path);

// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::string& path, std::string_view bytes);

}  // namespace helt::harness
