#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace numsarc::util {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view s);

/// Trimmed, non-empty lines that do not start with '#'.
std::vector<std::string> content_lines(std::string_view s);

/// Throws DataError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Half-up rounding to `digits` decimals, as used in printed tables.
double round_half_up(double value, int digits);

}  // namespace numsarc::util
