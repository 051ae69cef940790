#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "artemis/data/vitals.hpp"
#include "artemis/matrix.hpp"

namespace artemis::data {

// Pearson r of every column of `matrix` against column `target`. The entry
// for the target itself is 1. Throws ZeroVarianceError (named by
// `column_names` when given) for a constant column, DataError for < 2 rows.
std::vector<double> pearson_correlation(const Matrix& matrix, std::size_t target,
                                        std::span<const std::string> column_names = {});

// Full symmetric correlation matrix (heatmap input).
Matrix correlation_matrix(const Matrix& matrix, std::span<const std::string> column_names = {});

// Six vitals followed by acuity as a numeric column, for correlation analysis.
struct AnalysisTable {
  std::vector<std::string> columns;
  Matrix values;
};
AnalysisTable analysis_table(std::span<const TriageRecord> records,
                             std::span<const Feature> features);

struct Bin {
  double lower = 0.0;  // inclusive
  double upper = 0.0;  // exclusive
  std::array<std::size_t, kNumClasses> counts{};

  std::size_t total() const noexcept;
};

// Half-open bins [k*w, (k+1)*w) spanning the observed range, empty bins
// included. Records missing the feature or the acuity are skipped.
std::vector<Bin> bin_distribution(std::span<const TriageRecord> records, Feature feature,
                                  double bin_width);

nlohmann::json bins_to_json(std::span<const Bin> bins, Feature feature, double bin_width);

}  // namespace artemis::data
