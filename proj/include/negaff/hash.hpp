#pragma once

#include <string>
#include <string_view>

namespace negaff {

// Lowercase hex SHA-256. Used for cache keys and run-manifest input hashes.
std::string sha256_hex(std::string_view data);

// SHA-256 of file contents; throws Error when the file cannot be read.
std::string sha256_file_hex(const std::string& path);

// FNV-1a 64-bit hex; content fingerprint for model/lexicon stamps.
std::string fnv1a64_hex(std::string_view data);

}  // namespace negaff
