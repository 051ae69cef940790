#include "artemis/eval/metrics.hpp"

#include <cstdio>

#include "artemis/error.hpp"

namespace artemis::eval {

ClassMetrics metrics_from_counts(Acuity acuity, std::size_t tp, std::size_t tn, std::size_t fp,
                                 std::size_t fn) noexcept {
  ClassMetrics m{acuity, tp, tn, fp, fn};
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  m.precision_undefined = tp + fp == 0;
  m.recall_undefined = tp + fn == 0;
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  const double pr = m.precision + m.recall;
  m.f1 = pr > 0.0 ? 2.0 * m.precision * m.recall / pr : 0.0;
  return m;
}

double MetricsReport::macro_precision() const noexcept {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : classes) {
    if (c.tp + c.fn + c.fp == 0) continue;
    sum += c.precision;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

MetricsReport evaluate(std::span<const Acuity> predictions, std::span<const Acuity> truth) {
  if (predictions.size() != truth.size()) {
    throw DimensionError("predictions and truth differ in length");
  }
  if (truth.empty()) throw DataError("cannot evaluate an empty test set");

  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> confusion{};  // [truth][pred]
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++confusion[data::class_index(truth[i])][data::class_index(predictions[i])];
  }

  MetricsReport report;
  report.count = truth.size();
  std::size_t correct = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::size_t tp = confusion[c][c];
    std::size_t actual = 0;
    std::size_t predicted = 0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      actual += confusion[c][k];
      predicted += confusion[k][c];
    }
    const std::size_t fn = actual - tp;
    const std::size_t fp = predicted - tp;
    const std::size_t tn = truth.size() - tp - fn - fp;
    report.classes[c] = metrics_from_counts(data::acuity_at(c), tp, tn, fp, fn);
    correct += tp;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  return report;
}

nlohmann::json to_json(const MetricsReport& report) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : report.classes) {
    nlohmann::json jc = {{"class", data::level(c.acuity)},
                         {"tp", c.tp},
                         {"tn", c.tn},
                         {"fp", c.fp},
                         {"fn", c.fn},
                         {"precision", c.precision},
                         {"recall", c.recall},
                         {"f1", c.f1}};
    nlohmann::json flags = nlohmann::json::array();
    if (c.precision_undefined) flags.push_back("precision_zero_denominator");
    if (c.recall_undefined) flags.push_back("recall_zero_denominator");
    if (!flags.empty()) jc["flags"] = flags;
    classes.push_back(std::move(jc));
  }
  return {{"accuracy", report.accuracy},
          {"count", report.count},
          {"macro_precision", report.macro_precision()},
          {"classes", classes}};
}

std::string format_table(const MetricsReport& report, std::string_view title) {
  std::string out;
  char line[160];
  if (!title.empty()) {
    out += title;
    out += '\n';
  }
  std::snprintf(line, sizeof line, "Accuracy: %.4f  (n = %zu)\n", report.accuracy, report.count);
  out += line;
  std::snprintf(line, sizeof line, "%-6s %9s %9s %9s %9s %10s %10s %10s\n", "class", "TP", "TN",
                "FP", "FN", "Precision", "Recall", "F1_score");
  out += line;
  for (const auto& c : report.classes) {
    std::snprintf(line, sizeof line, "%-6d %9zu %9zu %9zu %9zu %10.4f %10.4f %10.4f%s\n",
                  data::level(c.acuity), c.tp, c.tn, c.fp, c.fn, c.precision, c.recall, c.f1,
                  (c.precision_undefined || c.recall_undefined) ? " *" : "");
    out += line;
  }
  return out;
}

}  // namespace artemis::eval
