#pragma once

#include <string>
#include <string_view>

namespace rtlxv::util {

/// Lowercase hex SHA-256 digest.
[[nodiscard]] std::string sha256_hex(std::string_view data);

}  // namespace rtlxv::util
