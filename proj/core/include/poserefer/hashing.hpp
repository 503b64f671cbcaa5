#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace poserefer {

// FNV-1a, 64 bit. Stable across platforms and runs, unlike std::hash.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

// Lowercase 16-digit hex rendering of a 64-bit hash.
std::string hex64(std::uint64_t h);

// Hash of a canonical JSON dump (object keys sorted), rendered as hex.
std::string content_hash(std::string_view canonical_text);

}  // namespace poserefer
