#pragma once

#include <cstdint>
#include <string_view>

namespace qcr {

// FNV-1a 64-bit over a canonical byte string. Used to fingerprint device
// parameters and timelines in output metadata so that downstream files can be
// matched to the inputs that produced them. Stable across platforms as long
// as the canonical serialization is stable (we serialize via std::to_chars).
inline std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= static_cast<std::uint64_t>(c);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

}  // namespace qcr
