#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sitesel {

// Counter-based seeding. Every random draw in the library comes from an
// engine seeded by hashing (seed, stream, index), so results never depend on
// iteration order or on how work is split between threads.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a; used to turn a module name into a stream id.
constexpr std::uint64_t stream_id(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index = 0,
                                    std::uint64_t sub = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ index);
  return splitmix64(h ^ sub);
}

/// Uniform double in [0, 1) from a hashed key; 53 random mantissa bits.
constexpr double unit_uniform(std::uint64_t key) {
  return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t index = 0,
                                   std::uint64_t sub = 0) {
  return std::mt19937_64{derive_seed(seed, stream, index, sub)};
}

}  // namespace sitesel
