#pragma once

#include <cstdint>

namespace radsum {

// SplitMix64 finalizer. Used as a stateless counter-based generator: the
// output for (key, counter) does not depend on how work is partitioned.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t index, std::uint64_t word) noexcept {
  return mix64(mix64(seed ^ 0x5851f42d4c957f2dULL) ^ mix64(index * 0x2545f4914f6cdd1dULL + word));
}

// Derives an independent sub-seed from a parent seed and a stream label.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(seed + mix64(stream + 0x632be59bd9b4e019ULL));
}

} // namespace radsum
