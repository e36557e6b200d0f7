#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace geocloud {

using Rng = std::mt19937_64;

/// FNV-1a; stable across platforms, used to derive per-entity streams.
constexpr std::uint64_t stable_hash(std::string_view text) noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

/// Independent generator for (seed, stream, salt).
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(salt),
                    static_cast<std::uint32_t>(salt >> 32)};
  return Rng(seq);
}

namespace streams {
inline constexpr std::uint64_t fleet = 1;
inline constexpr std::uint64_t requests = 2;
inline constexpr std::uint64_t prices = 3;
inline constexpr std::uint64_t temperatures = 4;
}  // namespace streams

}  // namespace geocloud
