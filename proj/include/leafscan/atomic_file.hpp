#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace leafscan {

/// Writes `data` to a sibling temp file and renames it over `path`, so
/// readers never observe a partial file. Throws IoError on failure.
void write_file_atomic(const std::filesystem::path &path, std::span<const std::uint8_t> data);
void write_file_atomic(const std::filesystem::path &path, std::string_view text);

std::vector<std::uint8_t> read_file(const std::filesystem::path &path);
std::string read_text_file(const std::filesystem::path &path);

} // namespace leafscan
