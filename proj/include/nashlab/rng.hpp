#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace nashlab {

using Rng = std::mt19937_64;

// Stable 64-bit mix of (seed, stream name, index). Same inputs give the same
// substream on every platform, so trials can run in any order.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream,
                          std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t seed, std::string_view stream,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(seed, stream, index));
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
}

}  // namespace nashlab
