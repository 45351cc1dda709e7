#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace neurolens {

using Bytes = std::vector<std::uint8_t>;

std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(std::string_view text);

std::string base64_encode(std::span<const std::uint8_t> data);
Bytes base64_decode(std::string_view text);

Bytes read_file(const std::filesystem::path &path);
std::string read_text_file(const std::filesystem::path &path);

// Writes through a sibling temp file and renames, so readers never see a
// partially written file.
void write_file_atomic(const std::filesystem::path &path, std::span<const std::uint8_t> data);
void write_file_atomic(const std::filesystem::path &path, std::string_view text);

// Stable 64-bit mixing, independent of std::hash.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stable_hash(std::string_view text, std::uint64_t seed = 0);

// Maps a hash to a uniform double in [0, 1).
inline double unit_interval(std::uint64_t h) {
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
}

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
// Collapses every whitespace run to one space and trims the ends.
std::string collapse_whitespace(std::string_view s);
std::vector<std::string> split_words(std::string_view s);

} // namespace neurolens
