#pragma once

#include <span>
#include <vector>

#include "artemis/data/vitals.hpp"
#include "artemis/matrix.hpp"

namespace artemis::data {

// z-score parameters, population standard deviation.
struct NormalizationParams {
  std::vector<Feature> features;
  std::vector<double> mean;
  std::vector<double> stddev;

  bool empty() const noexcept { return features.empty(); }
  bool operator==(const NormalizationParams&) const = default;
};

// Throws ZeroVarianceError naming the first constant feature, DataError on an
// empty set or a missing value.
NormalizationParams fit_normalizer(std::span<const TriageRecord> records,
                                   std::span<const Feature> features);

// Column-wise variant over a raw matrix whose columns follow `features`.
NormalizationParams fit_normalizer(const Matrix& raw, std::span<const Feature> features);

// Raw (un-normalized) feature matrix; DataError names the row of a missing value.
Matrix extract_features(std::span<const TriageRecord> records, std::span<const Feature> features);

Matrix apply_normalizer(const NormalizationParams& params, std::span<const TriageRecord> records);
Matrix apply_normalizer(const NormalizationParams& params, const Matrix& raw);
std::vector<double> apply_normalizer(const NormalizationParams& params, const VitalSigns& vitals);

}  // namespace artemis::data
