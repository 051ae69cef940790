#include "artemis/eval/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "artemis/error.hpp"

namespace artemis::eval {

namespace {
constexpr std::size_t kMinPairs = 5;
}

double SignedRanks::negative_rank_sum() const noexcept {
  double w = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (negative[i]) w += ranks[i];
  }
  return w;
}

SignedRanks signed_ranks(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("paired samples differ in length");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t x, std::size_t y) {
    return std::abs(diffs[x]) < std::abs(diffs[y]);
  });

  SignedRanks out;
  out.ranks.assign(n, 0.0);
  out.negative.assign(n, false);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
    // positions i..j (0-based) share ranks i+1..j+1
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = avg;
    if (j > i) out.tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }
  for (std::size_t i = 0; i < n; ++i) out.negative[i] = diffs[i] < 0.0;
  return out;
}

double wilcoxon_exact_p(const SignedRanks& ranks, double w) {
  // Average ranks are multiples of 1/2, so doubled ranks are integers.
  std::vector<std::size_t> doubled;
  std::size_t total = 0;
  for (double r : ranks.ranks) {
    doubled.push_back(static_cast<std::size_t>(std::llround(2.0 * r)));
    total += doubled.back();
  }
  // ways[s] = number of sign assignments whose doubled negative-rank sum is s.
  std::vector<std::uint64_t> ways(total + 1, 0);
  ways[0] = 1;
  std::size_t reach = 0;
  for (auto r : doubled) {
    for (std::size_t s = reach + 1; s-- > 0;) {
      if (ways[s] != 0) ways[s + r] += ways[s];
    }
    reach += r;
  }
  const double limit = 2.0 * w + 1e-9;
  std::uint64_t at_most = 0;
  for (std::size_t s = 0; s <= total && static_cast<double>(s) <= limit; ++s) at_most += ways[s];
  return std::ldexp(static_cast<double>(at_most), -static_cast<int>(doubled.size()));
}

double wilcoxon_normal_p(const SignedRanks& ranks, double w) {
  const auto n = static_cast<double>(ranks.size());
  const double mean = n * (n + 1.0) / 4.0;
  double tie_term = 0.0;
  for (auto t : ranks.tie_sizes) {
    const auto td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  const double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (!(variance > 0.0)) return 1.0;
  const double z = (w - mean + 0.5) / std::sqrt(variance);
  const double p = 0.5 * std::erfc(-z / std::sqrt(2.0));
  return std::clamp(p, std::numeric_limits<double>::min(), 1.0);
}

WilcoxonResult wilcoxon_one_tailed(std::span<const double> a, std::span<const double> b) {
  const SignedRanks ranks = signed_ranks(a, b);
  if (ranks.size() < kMinPairs) {
    throw InsufficientDataError("Wilcoxon test needs at least 5 non-zero differences, got " +
                                std::to_string(ranks.size()));
  }
  WilcoxonResult result;
  result.n = ranks.size();
  result.w = ranks.negative_rank_sum();
  result.exact = ranks.size() <= kWilcoxonExactLimit;
  result.p = result.exact ? wilcoxon_exact_p(ranks, result.w) : wilcoxon_normal_p(ranks, result.w);
  return result;
}

}  // namespace artemis::eval
