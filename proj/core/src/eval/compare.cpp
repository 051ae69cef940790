#include "artemis/eval/compare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "artemis/error.hpp"
#include "artemis/eval/metrics.hpp"
#include "artemis/random.hpp"

namespace artemis::eval {

ComparisonReport compare_models(const models::Predictor& model_a, const models::Predictor& model_b,
                                const models::Dataset& dataset, const CompareConfig& config) {
  if (config.n_subsets < 5) throw ConfigError("model comparison needs at least 5 subsets");
  if (!(config.subset_fraction > 0.0 && config.subset_fraction <= 1.0)) {
    throw ConfigError("subset fraction must lie in (0, 1]");
  }
  if (dataset.size() == 0) throw DataError("cannot compare models on an empty dataset");

  ComparisonReport report;
  report.n_subsets = config.n_subsets;
  report.subset_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(config.subset_fraction *
                                               static_cast<double>(dataset.size()))));

  // Predictions are per row, so score every row once and index per subset.
  std::vector<Acuity> pred_a;
  std::vector<Acuity> pred_b;
  pred_a.reserve(dataset.size());
  pred_b.reserve(dataset.size());
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    pred_a.push_back(model_a(dataset.features.row(r)));
    pred_b.push_back(model_b(dataset.features.row(r)));
  }

  std::vector<std::size_t> pool(dataset.size());
  std::vector<Acuity> truth;
  std::vector<Acuity> sub_a;
  std::vector<Acuity> sub_b;
  for (std::size_t k = 0; k < config.n_subsets; ++k) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    Rng rng(derive_seed(config.seed, k));
    std::shuffle(pool.begin(), pool.end(), rng);
    truth.clear();
    sub_a.clear();
    sub_b.clear();
    for (std::size_t i = 0; i < report.subset_size; ++i) {
      truth.push_back(dataset.labels[pool[i]]);
      sub_a.push_back(pred_a[pool[i]]);
      sub_b.push_back(pred_b[pool[i]]);
    }
    const double pa = evaluate(sub_a, truth).macro_precision();
    const double pb = evaluate(sub_b, truth).macro_precision();
    report.precision_a.push_back(pa);
    report.precision_b.push_back(pb);
    if (pa > pb) {
      ++report.wins_a;
    } else if (pb > pa) {
      ++report.wins_b;
    } else {
      ++report.ties;
    }
  }

  try {
    report.test = wilcoxon_one_tailed(report.precision_a, report.precision_b);
  } catch (const InsufficientDataError& e) {
    report.error = e.what();
  }
  return report;
}

nlohmann::json to_json(const ComparisonReport& report) {
  nlohmann::json j = {{"n_subsets", report.n_subsets},
                      {"subset_size", report.subset_size},
                      {"wins_a", report.wins_a},
                      {"wins_b", report.wins_b},
                      {"ties", report.ties},
                      {"precision_a", report.precision_a},
                      {"precision_b", report.precision_b}};
  if (report.test) {
    j["W"] = report.test->w;
    j["p_value"] = report.test->p;
    j["n_nonzero"] = report.test->n;
    j["exact"] = report.test->exact;
  } else {
    j["W"] = nullptr;
    j["p_value"] = nullptr;
  }
  if (report.error) j["error"] = *report.error;
  return j;
}

std::string format_table(const ComparisonReport& report, std::string_view name_a,
                         std::string_view name_b) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%zu subsets of %zu records\n", report.n_subsets,
                report.subset_size);
  out += buf;
  std::snprintf(buf, sizeof buf, "wins  %-14.*s %zu\nwins  %-14.*s %zu\nties                 %zu\n",
                static_cast<int>(name_a.size()), name_a.data(), report.wins_a,
                static_cast<int>(name_b.size()), name_b.data(), report.wins_b, report.ties);
  out += buf;
  if (report.test) {
    std::snprintf(buf, sizeof buf, "Wilcoxon W = %.1f, one-tailed p = %.3g (%s, n = %zu)\n",
                  report.test->w, report.test->p, report.test->exact ? "exact" : "normal approx.",
                  report.test->n);
  } else {
    std::snprintf(buf, sizeof buf, "Wilcoxon test not run: %s\n",
                  report.error.value_or("unknown").c_str());
  }
  out += buf;
  return out;
}

}  // namespace artemis::eval
