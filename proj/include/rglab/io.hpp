#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace rglab {

// 17 significant digits: exact round-trip for 64-bit floats.
std::string format_double(double v);

// FNV-1a 64-bit content hash, hex encoded. Integrity echo for manifests, not
// a cryptographic digest.
std::string fnv1a64_hex(std::string_view bytes);

// Binary-mode write/read so line endings stay LF everywhere.
void write_text_file(const std::filesystem::path& path,
                     std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace rglab
