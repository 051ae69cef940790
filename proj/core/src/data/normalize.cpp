#include "artemis/data/normalize.hpp"

#include <algorithm>
#include <cmath>

#include "artemis/error.hpp"

namespace artemis::data {

Matrix extract_features(std::span<const TriageRecord> records, std::span<const Feature> features) {
  Matrix out(records.size(), features.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (std::size_t c = 0; c < features.size(); ++c) {
      const double v = records[r].vitals[features[c]];
      if (is_missing(v)) {
        throw DataError("row " + std::to_string(r) + ": missing feature '" +
                        std::string(feature_name(features[c])) + "'");
      }
      out(r, c) = v;
    }
  }
  return out;
}

NormalizationParams fit_normalizer(const Matrix& raw, std::span<const Feature> features) {
  if (raw.cols() != features.size()) {
    throw DimensionError("matrix has " + std::to_string(raw.cols()) + " columns for " +
                         std::to_string(features.size()) + " features");
  }
  if (raw.rows() == 0) throw DataError("cannot fit a normalizer on zero records");

  NormalizationParams params;
  params.features.assign(features.begin(), features.end());
  const auto n = static_cast<double>(raw.rows());
  for (std::size_t c = 0; c < raw.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < raw.rows(); ++r) sum += raw(r, c);
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < raw.rows(); ++r) {
      const double d = raw(r, c) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / n);
    // Constant columns can leave rounding residue in sd.
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) throw ZeroVarianceError(std::string(feature_name(features[c])));
    params.mean.push_back(mean);
    params.stddev.push_back(sd);
  }
  return params;
}

NormalizationParams fit_normalizer(std::span<const TriageRecord> records,
                                   std::span<const Feature> features) {
  return fit_normalizer(extract_features(records, features), features);
}

Matrix apply_normalizer(const NormalizationParams& params, const Matrix& raw) {
  if (raw.cols() != params.features.size()) {
    throw DimensionError("normalizer expects " + std::to_string(params.features.size()) +
                         " columns, got " + std::to_string(raw.cols()));
  }
  Matrix out(raw.rows(), raw.cols());
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    for (std::size_t c = 0; c < raw.cols(); ++c) {
      out(r, c) = (raw(r, c) - params.mean[c]) / params.stddev[c];
    }
  }
  return out;
}

Matrix apply_normalizer(const NormalizationParams& params, std::span<const TriageRecord> records) {
  return apply_normalizer(params, extract_features(records, params.features));
}

std::vector<double> apply_normalizer(const NormalizationParams& params, const VitalSigns& vitals) {
  std::vector<double> out(params.features.size());
  for (std::size_t c = 0; c < out.size(); ++c) {
    const double v = vitals[params.features[c]];
    if (is_missing(v)) {
      throw DataError("missing feature '" + std::string(feature_name(params.features[c])) + "'");
    }
    out[c] = (v - params.mean[c]) / params.stddev[c];
  }
  return out;
}

}  // namespace artemis::data
