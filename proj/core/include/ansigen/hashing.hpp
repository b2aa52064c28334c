#pragma once

#include <string>
#include <string_view>

namespace ansigen {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// SHA-256 of a file's bytes. Throws std::runtime_error when unreadable.
std::string sha256_file(const std::string& path);

}  // namespace ansigen
