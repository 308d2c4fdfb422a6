// Content hashing for cache keys, run manifests and artifact lineage.
#pragma once

#include <string>
#include <string_view>

namespace atoss::util {

// Hex-encoded SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

// SHA-256 of a file's contents. Throws MissingUpstream if unreadable.
std::string sha256_file(const std::string& path);

}  // namespace atoss::util
