#pragma once

#include <cstdint>
#include <random>

namespace patchglr {

/// splitmix64 finalizer. Good avalanche, used only to derive seeds.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic named sub-stream derivation: all randomness in an
/// experiment flows from one master seed through (tag, index) chains.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag));
}

inline std::uint64_t substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return substream(substream(seed, tag), index);
}

inline std::uint64_t substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t i, std::uint64_t j) {
  return substream(substream(substream(seed, tag), i), j);
}

namespace stream {
// Tags for the named sub-streams of the pipeline.
inline constexpr std::uint64_t noise = 0x6e6f697365ULL;      // "noise"
inline constexpr std::uint64_t transform = 0x7866726dULL;    // "xfrm"
inline constexpr std::uint64_t kmeans = 0x6b6d65616eULL;     // "kmean"
inline constexpr std::uint64_t texture = 0x74657874ULL;      // "text"
} // namespace stream

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(splitmix64(seed)); }

} // namespace patchglr
