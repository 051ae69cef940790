#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "artemis/data/vitals.hpp"

namespace artemis::data {

struct PreprocessReport {
  std::size_t input_count = 0;
  std::size_t duplicate_count = 0;
  std::size_t missing_count = 0;
  std::size_t outlier_count = 0;
  std::size_t output_count = 0;

  bool consistent() const noexcept {
    return output_count + duplicate_count + missing_count + outlier_count == input_count;
  }
  bool operator==(const PreprocessReport&) const = default;
};

struct PreprocessResult {
  std::vector<TriageRecord> kept;
  PreprocessReport report;
};

// Drops exact duplicates (first occurrence kept), then rows with a missing
// vital or acuity, then rows outside `bounds`. Each row is counted once, by
// the first filter that removes it. Pain and chief complaint may be absent.
PreprocessResult preprocess(std::span<const TriageRecord> records,
                            const OutlierBounds& bounds = kDefaultBounds);

// Per-class counts indexed by class_index(); records without acuity are skipped.
std::array<std::size_t, kNumClasses> class_counts(std::span<const TriageRecord> records);

// Down-samples every represented class, uniformly without replacement, to the
// size of the smallest represented class. Output is grouped by acuity and keeps
// input order within a class.
std::vector<TriageRecord> rebalance(std::span<const TriageRecord> records, std::uint64_t seed);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded shuffle of 0..n-1; train takes the first floor(n * ratio).
SplitIndices split_indices(std::size_t n, double ratio, std::uint64_t seed);

template <typename T>
std::pair<std::vector<T>, std::vector<T>> split(std::span<const T> items, double ratio,
                                                std::uint64_t seed) {
  const auto idx = split_indices(items.size(), ratio, seed);
  std::pair<std::vector<T>, std::vector<T>> out;
  out.first.reserve(idx.train.size());
  out.second.reserve(idx.test.size());
  for (auto i : idx.train) out.first.push_back(items[i]);
  for (auto i : idx.test) out.second.push_back(items[i]);
  return out;
}

}  // namespace artemis::data
