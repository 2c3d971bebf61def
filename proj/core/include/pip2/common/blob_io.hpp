#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace pip2::io {

// Raw little-endian IEEE-754 binary64 blobs. Byte order is fixed regardless of host.
void write_f64_blob(const std::filesystem::path& path, std::span<const double> values);
std::vector<double> read_f64_blob(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// FNV-1a, 64-bit. Used for config fingerprints only.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace pip2::io
