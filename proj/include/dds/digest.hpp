#pragma once

#include <string>
#include <string_view>

namespace dds {

/// Lowercase hex SHA-256 of the input bytes.
std::string sha256_hex(std::string_view bytes);

/// "sha256:" + sha256_hex(bytes).
std::string digest_of(std::string_view bytes);

/// True iff s is "sha256:" followed by exactly 64 lowercase hex chars.
bool is_valid_digest(const std::string& s);

/// The chain anchor for audit logs: "sha256:" + 64 zeros.
const std::string& zero_digest();

}  // namespace dds
