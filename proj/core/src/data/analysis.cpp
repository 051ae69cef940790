#include "artemis/data/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "artemis/error.hpp"

namespace artemis::data {

namespace {

struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> centered_norm;  // sqrt(sum (x - mean)^2)
};

ColumnStats column_stats(const Matrix& m, std::span<const std::string> names) {
  if (m.rows() < 2) throw DataError("correlation needs at least 2 rows");
  ColumnStats s;
  const auto n = static_cast<double>(m.rows());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) sum += m(r, c);
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) ss += (m(r, c) - mean) * (m(r, c) - mean);
    const double norm = std::sqrt(ss);
    if (!(norm > 1e-12 * std::max(1.0, std::abs(mean)) * std::sqrt(n))) {
      throw ZeroVarianceError(c < names.size() ? names[c] : "column " + std::to_string(c));
    }
    s.mean.push_back(mean);
    s.centered_norm.push_back(norm);
  }
  return s;
}

double pearson(const Matrix& m, const ColumnStats& s, std::size_t a, std::size_t b) {
  if (a == b) return 1.0;
  double cov = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    cov += (m(r, a) - s.mean[a]) * (m(r, b) - s.mean[b]);
  }
  return std::clamp(cov / (s.centered_norm[a] * s.centered_norm[b]), -1.0, 1.0);
}

}  // namespace

std::vector<double> pearson_correlation(const Matrix& matrix, std::size_t target,
                                        std::span<const std::string> column_names) {
  if (target >= matrix.cols()) throw DimensionError("target column out of range");
  const auto stats = column_stats(matrix, column_names);
  std::vector<double> out(matrix.cols());
  for (std::size_t c = 0; c < matrix.cols(); ++c) out[c] = pearson(matrix, stats, c, target);
  return out;
}

Matrix correlation_matrix(const Matrix& matrix, std::span<const std::string> column_names) {
  const auto stats = column_stats(matrix, column_names);
  Matrix out(matrix.cols(), matrix.cols());
  for (std::size_t a = 0; a < matrix.cols(); ++a) {
    for (std::size_t b = a; b < matrix.cols(); ++b) {
      out(a, b) = out(b, a) = pearson(matrix, stats, a, b);
    }
  }
  return out;
}

AnalysisTable analysis_table(std::span<const TriageRecord> records,
                             std::span<const Feature> features) {
  AnalysisTable t;
  for (Feature f : features) t.columns.emplace_back(feature_name(f));
  t.columns.emplace_back("acuity");
  t.values = Matrix(records.size(), features.size() + 1);
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (!records[r].acuity) throw DataError("row " + std::to_string(r) + ": missing acuity");
    for (std::size_t c = 0; c < features.size(); ++c) {
      const double v = records[r].vitals[features[c]];
      if (is_missing(v)) {
        throw DataError("row " + std::to_string(r) + ": missing '" + t.columns[c] + "'");
      }
      t.values(r, c) = v;
    }
    t.values(r, features.size()) = level(*records[r].acuity);
  }
  return t;
}

std::size_t Bin::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::vector<Bin> bin_distribution(std::span<const TriageRecord> records, Feature feature,
                                  double bin_width) {
  if (!(bin_width > 0.0)) throw ConfigError("bin width must be positive");
  std::map<long long, std::array<std::size_t, kNumClasses>> by_bin;
  for (const auto& r : records) {
    const double v = r.vitals[feature];
    if (is_missing(v) || !r.acuity) continue;
    const auto k = static_cast<long long>(std::floor(v / bin_width));
    ++by_bin[k][class_index(*r.acuity)];
  }
  std::vector<Bin> bins;
  if (by_bin.empty()) return bins;
  const long long first = by_bin.begin()->first;
  const long long last = by_bin.rbegin()->first;
  for (long long k = first; k <= last; ++k) {
    Bin b;
    b.lower = static_cast<double>(k) * bin_width;
    b.upper = static_cast<double>(k + 1) * bin_width;
    if (auto it = by_bin.find(k); it != by_bin.end()) b.counts = it->second;
    bins.push_back(b);
  }
  return bins;
}

nlohmann::json bins_to_json(std::span<const Bin> bins, Feature feature, double bin_width) {
  nlohmann::json jbins = nlohmann::json::array();
  for (const auto& b : bins) {
    jbins.push_back({{"lower", b.lower}, {"upper", b.upper}, {"counts", b.counts}});
  }
  return {{"feature", feature_name(feature)}, {"bin_width", bin_width}, {"bins", jbins}};
}

}  // namespace artemis::data
