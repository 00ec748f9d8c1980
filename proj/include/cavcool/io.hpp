#pragma once

#include <filesystem>
#include <string>

namespace cavcool {

/// printf-style %.<precision>g; NaN prints as "nan", infinities as "inf"/"-inf".
std::string format_number(double x, int precision = 12);

/// Shortest form that parses back to the identical double.
std::string format_exact(double x);

/// Writes `content` to a temporary sibling and renames it over `path`, so a
/// reader never observes a partially written file. Throws cavcool::Error.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace cavcool
