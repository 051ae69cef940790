#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "artemis/eval/wilcoxon.hpp"
#include "artemis/models/classify.hpp"

namespace artemis::eval {

struct ComparisonReport {
  std::size_t n_subsets = 0;
  std::size_t subset_size = 0;
  std::size_t wins_a = 0;
  std::size_t wins_b = 0;
  std::size_t ties = 0;
  std::vector<double> precision_a;  // macro precision per subset
  std::vector<double> precision_b;
  std::optional<WilcoxonResult> test;  // empty when the test could not run
  std::optional<std::string> error;    // why `test` is empty
};

struct CompareConfig {
  std::size_t n_subsets = 50;
  double subset_fraction = 0.2;
  std::uint64_t seed = 0;
};

// Scores both predictors by macro precision on `n_subsets` random subsets
// (each drawn without replacement, independently of the others) and tests
// a > b with the one-tailed Wilcoxon signed-rank test. Subset k depends only
// on (seed, k). InsufficientData from the test is recorded, not thrown.
ComparisonReport compare_models(const models::Predictor& model_a, const models::Predictor& model_b,
                                const models::Dataset& dataset, const CompareConfig& config);

nlohmann::json to_json(const ComparisonReport& report);
std::string format_table(const ComparisonReport& report, std::string_view name_a,
                         std::string_view name_b);

}  // namespace artemis::eval
