#include <benchmark/benchmark.h>

#include "artemis/data/normalize.hpp"
#include "artemis/data/synth.hpp"
#include "artemis/models/mlp.hpp"
#include "artemis/models/tree.hpp"

using namespace artemis;

namespace {

models::Dataset synthetic(std::size_t n) {
  const auto rows = data::synthesize(n, data::reference_class_mix(), data::default_synthesis_noise(),
                                     data::default_rule_table(), 1);
  const auto norm = data::fit_normalizer(rows, data::kClassifierFeatures);
  models::Dataset ds;
  ds.features = data::apply_normalizer(norm, rows);
  for (const auto& r : rows) ds.labels.push_back(*r.acuity);
  return ds;
}

void BM_MlpForward(benchmark::State& state) {
  const auto model = models::mlp_init(3, models::kDefaultHiddenWidths, 1);
  const std::array<double, 3> x = {0.1, -0.3, 0.7};
  for (auto _ : state) benchmark::DoNotOptimize(models::mlp_forward(model, x));
}
BENCHMARK(BM_MlpForward);

void BM_MlpEpoch(benchmark::State& state) {
  const auto ds = synthetic(static_cast<std::size_t>(state.range(0)));
  models::TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(models::mlp_train(models::mlp_init(3, models::kDefaultHiddenWidths, 1), ds, cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpEpoch)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_TreeFit(benchmark::State& state) {
  const auto ds = synthetic(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(models::tree_fit(ds));
}
BENCHMARK(BM_TreeFit)->Arg(10000)->Arg(48000)->Unit(benchmark::kMillisecond);

}  // namespace
