#pragma once

#include <filesystem>
#include <string>

namespace codemie::util {

std::string read_file(const std::filesystem::path& path);

// Writes via a temporary sibling file and an atomic rename, so readers never
// observe partial content.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

void append_line(const std::filesystem::path& path, const std::string& line);

} // namespace codemie::util
