#pragma once

#include <cstdint>
#include <random>

namespace curvtest {

// =====================================================================
// Deterministic RNG substreams.
//
// Every stochastic task (bootstrap replicate b, Monte Carlo replication
// r, bandwidth subsampling, multistart s) derives its own engine from
// (seed, stream_id) through a SplitMix64 mix.  Streams are independent
// of evaluation order and thread count, so parallel and serial runs
// draw identical variates.
// =====================================================================

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Collapses (seed, stream) into a single well-mixed 64-bit state.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream * 0xD2B74407B1CE6E93ULL + 0x8CB92BA72F3D8DD7ULL));
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(mix_seed(seed, stream));
}

// Fixed stream salts, one per independent consumer of the user seed.
namespace stream {
inline constexpr std::uint64_t kBootstrap = 0x01;      // + replicate index
inline constexpr std::uint64_t kMcData = 0x1000000;    // + replication index
inline constexpr std::uint64_t kMcTest = 0x2000000;    // + replication index
inline constexpr std::uint64_t kBandwidthTriples = 0x5150BADC0FFEEULL;  // internal, seed-independent
inline constexpr std::uint64_t kMrcStart = 0x3000000;  // + multistart index
}  // namespace stream

}  // namespace curvtest
