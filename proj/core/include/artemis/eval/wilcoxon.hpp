#pragma once

#include <span>
#include <vector>

namespace artemis::eval {

// Above this many non-zero differences the normal approximation is used.
inline constexpr std::size_t kWilcoxonExactLimit = 25;

// Non-zero paired differences a - b with average ranks of |d|.
struct SignedRanks {
  std::vector<double> ranks;    // rank of |d_i|
  std::vector<bool> negative;   // d_i < 0
  std::vector<std::size_t> tie_sizes;  // sizes of groups of equal |d| (> 1 only)

  std::size_t size() const noexcept { return ranks.size(); }
  double negative_rank_sum() const noexcept;
};

SignedRanks signed_ranks(std::span<const double> a, std::span<const double> b);

// P(W <= w) under the null, W the rank sum of negative signs, by counting all
// 2^n equally likely sign assignments (dynamic programming over half-ranks).
double wilcoxon_exact_p(const SignedRanks& ranks, double w);

// Normal approximation with tie-corrected variance and continuity correction.
double wilcoxon_normal_p(const SignedRanks& ranks, double w);

struct WilcoxonResult {
  double w = 0.0;  // sum of ranks of negative differences
  double p = 1.0;  // one-tailed, alternative: a > b
  std::size_t n = 0;
  bool exact = false;
};

// Throws InsufficientDataError with fewer than 5 non-zero differences and
// DimensionError on unequal lengths.
WilcoxonResult wilcoxon_one_tailed(std::span<const double> a, std::span<const double> b);

}  // namespace artemis::eval
