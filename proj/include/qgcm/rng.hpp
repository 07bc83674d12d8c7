// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qgcm {

// Counter-based stream derivation: every stochastic quantity in the library
// draws from an engine seeded by a hash of (global seed, stream fields...).
// Results are therefore independent of evaluation order and reproducible
// across runs with the same seed.

/// splitmix64 finalizer; good avalanche behaviour for key derivation.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Collapse an ordered field list into a single 64-bit stream key.
constexpr std::uint64_t stream_key(std::initializer_list<std::uint64_t> fields) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;  // arbitrary domain constant
  for (std::uint64_t f : fields) h = mix64(h ^ f);
  return h;
}

/// Engine seeded from a derived stream key.
inline std::mt19937_64 keyed_engine(std::initializer_list<std::uint64_t> fields) {
  return std::mt19937_64(stream_key(fields));
}

}  // namespace qgcm
