#include "poserefer/hashing.hpp"

#include <cstdio>

namespace poserefer {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string content_hash(std::string_view canonical_text) {
  return hex64(fnv1a64(canonical_text));
}

}  // namespace poserefer
