#pragma once

#include <cstdint>
#include <random>

namespace affine {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Engine for stream `index` of a run seeded with `seed`. Streams are independent of
/// each other and of the order in which they are created, so per-path results do not
/// depend on the thread schedule.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t a = splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  std::uint64_t b = splitmix64(a ^ index);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

inline double uniform01(std::mt19937_64& g) { return std::uniform_real_distribution<double>(0.0, 1.0)(g); }

inline double standard_normal(std::mt19937_64& g) { return std::normal_distribution<double>(0.0, 1.0)(g); }

}  // namespace affine
