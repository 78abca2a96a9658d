#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace exactls {

using Rng = std::mt19937_64;

/// Seed used whenever the caller does not provide one.
inline constexpr std::uint64_t kDefaultSeed = 20180417ULL;

/// Independent deterministic stream for replicate `stream` of a run seeded
/// with `seed`. Streams depend only on (seed, stream), never on scheduling.
inline Rng stream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5851f42du};
  return Rng(seq);
}

inline void fill_standard_normal(Rng& rng, std::span<double> out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : out) v = normal(rng);
}

inline std::vector<double> standard_normal_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  fill_standard_normal(rng, v);
  return v;
}

}  // namespace exactls
