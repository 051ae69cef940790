#pragma once

#include <cstdint>
#include <random>

namespace artemis {

using Rng = std::mt19937_64;

// Fans a run seed out into independent per-stage seeds (splitmix64 finalizer).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t offset) noexcept {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (offset + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Fixed stage offsets for run-level seeding.
namespace seed_offset {
inline constexpr std::uint64_t kSynthesize = 1;
inline constexpr std::uint64_t kRebalance = 2;
inline constexpr std::uint64_t kSplit = 3;
inline constexpr std::uint64_t kTrainMlp = 4;
inline constexpr std::uint64_t kTrainEnsemble = 5;
inline constexpr std::uint64_t kCompare = 6;
inline constexpr std::uint64_t kSimulate = 7;
}  // namespace seed_offset

}  // namespace artemis
