#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace opseq {

// Writes to a sibling temporary and renames over the target, so readers never
// observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// Shortest round-trip text for a double.
std::string format_double(double v);
std::string format_fixed(double v, int decimals);

std::size_t parse_size(std::string_view text, std::string_view what);
double parse_double(std::string_view text, std::string_view what);
std::uint64_t parse_u64(std::string_view text, std::string_view what);

std::string_view trim(std::string_view s);

}  // namespace opseq
