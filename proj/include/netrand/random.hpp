#pragma once

#include <cstdint>
#include <random>

namespace netrand {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one engine output.
/// Unlike std::uniform_real_distribution this consumes exactly one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for replicate `replicate` of cell `cell`, sub-stream `stream`.
/// Each coordinate is folded through splitmix64 so that neighbouring keys
/// give unrelated engine states.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t cell,
                                 std::uint64_t replicate, std::uint64_t stream = 0) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ cell);
  h = splitmix64(h ^ (replicate * 0xD1B54A32D192ED03ULL));
  h = splitmix64(h ^ (stream + 0x632BE59BD9B4E019ULL));
  return h;
}

}  // namespace netrand
