#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace bg2 {

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// FNV-1a 64-bit, used to fold identifiers into seeds.
std::uint64_t fnv1a64(std::string_view s);

} // namespace bg2
