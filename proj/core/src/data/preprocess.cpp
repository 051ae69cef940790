#include "artemis/data/preprocess.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "artemis/error.hpp"
#include "artemis/random.hpp"

namespace artemis::data {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) noexcept {
  return h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2));
}

std::uint64_t hash_value(double v) noexcept {
  if (std::isnan(v)) return 0x7FF8000000000001ULL;
  if (v == 0.0) return 0;  // +0 and -0 compare equal
  return std::bit_cast<std::uint64_t>(v);
}

std::uint64_t record_hash(const TriageRecord& r) noexcept {
  std::uint64_t h = 0;
  for (Feature f : kAllFeatures) h = mix(h, hash_value(r.vitals[f]));
  h = mix(h, r.vitals.pain ? static_cast<std::uint64_t>(*r.vitals.pain) + 1 : 0);
  h = mix(h, r.acuity ? static_cast<std::uint64_t>(level(*r.acuity)) : 0);
  h = mix(h, r.chief_complaint ? std::hash<std::string>{}(*r.chief_complaint) + 1 : 0);
  return h;
}

}  // namespace

PreprocessResult preprocess(std::span<const TriageRecord> records, const OutlierBounds& bounds) {
  PreprocessResult result;
  result.report.input_count = records.size();

  // hash -> indices into `unique` sharing that hash
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen;
  std::vector<const TriageRecord*> unique;
  unique.reserve(records.size());
  for (const auto& r : records) {
    auto& bucket = seen[record_hash(r)];
    const bool dup = std::ranges::any_of(
        bucket, [&](std::size_t i) { return unique[i]->same_as(r); });
    if (dup) {
      ++result.report.duplicate_count;
      continue;
    }
    bucket.push_back(unique.size());
    unique.push_back(&r);
  }

  for (const TriageRecord* r : unique) {
    if (!r->acuity || !r->vitals.complete()) {
      ++result.report.missing_count;
    } else if (!bounds.contains(r->vitals)) {
      ++result.report.outlier_count;
    } else {
      result.kept.push_back(*r);
    }
  }
  result.report.output_count = result.kept.size();
  return result;
}

std::array<std::size_t, kNumClasses> class_counts(std::span<const TriageRecord> records) {
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& r : records) {
    if (r.acuity) ++counts[class_index(*r.acuity)];
  }
  return counts;
}

std::vector<TriageRecord> rebalance(std::span<const TriageRecord> records, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].acuity) by_class[class_index(*records[i].acuity)].push_back(i);
  }
  std::size_t target = 0;
  bool any = false;
  for (const auto& members : by_class) {
    if (members.empty()) continue;
    target = any ? std::min(target, members.size()) : members.size();
    any = true;
  }

  Rng rng(seed);
  std::vector<TriageRecord> out;
  out.reserve(target * kNumClasses);
  for (auto& members : by_class) {
    if (members.empty()) continue;
    std::shuffle(members.begin(), members.end(), rng);
    members.resize(target);
    std::ranges::sort(members);
    for (auto i : members) out.push_back(records[i]);
  }
  return out;
}

SplitIndices split_indices(std::size_t n, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("split ratio must lie strictly between 0 and 1");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train =
      static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio));
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return out;
}

}  // namespace artemis::data
