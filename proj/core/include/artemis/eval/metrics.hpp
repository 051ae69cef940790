#pragma once

#include <array>
#include <span>
#include <string>

#include <json.hpp>

#include "artemis/data/vitals.hpp"

namespace artemis::eval {

using data::Acuity;
using data::kNumClasses;

// One-vs-all counts and rates for one class. A rate whose denominator is zero
// is reported as 0 and flagged.
struct ClassMetrics {
  Acuity acuity = Acuity::Critical;
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
};

ClassMetrics metrics_from_counts(Acuity acuity, std::size_t tp, std::size_t tn, std::size_t fp,
                                 std::size_t fn) noexcept;

struct MetricsReport {
  std::array<ClassMetrics, kNumClasses> classes{};
  double accuracy = 0.0;
  std::size_t count = 0;

  // Mean precision over classes present in the truth or the predictions.
  double macro_precision() const noexcept;
};

// Throws DimensionError on a length mismatch, DataError on empty input.
MetricsReport evaluate(std::span<const Acuity> predictions, std::span<const Acuity> truth);

nlohmann::json to_json(const MetricsReport& report);

// Aligned text table: class, TP, TN, FP, FN, precision, recall, F1.
std::string format_table(const MetricsReport& report, std::string_view title = {});

}  // namespace artemis::eval
