#include <benchmark/benchmark.h>

#include <random>

#include "artemis/eval/roc.hpp"
#include "artemis/eval/wilcoxon.hpp"

using namespace artemis;

namespace {

void BM_WilcoxonExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = g(rng);
    b[i] = g(rng);
  }
  const auto r = eval::signed_ranks(a, b);
  const double w = r.negative_rank_sum();
  for (auto _ : state) benchmark::DoNotOptimize(eval::wilcoxon_exact_p(r, w));
}
BENCHMARK(BM_WilcoxonExact)->Arg(10)->Arg(25);

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u;
  std::uniform_int_distribution<int> c(1, 5);
  std::vector<double> s(n);
  std::vector<data::Acuity> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = u(rng);
    t[i] = static_cast<data::Acuity>(c(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(eval::roc_auc(s, t, data::Acuity::Critical));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RocAuc)->Arg(12000);

}  // namespace
