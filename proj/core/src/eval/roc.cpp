#include "artemis/eval/roc.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "artemis/error.hpp"

namespace artemis::eval {

RocCurve roc_auc(std::span<const double> scores, std::span<const data::Acuity> truth,
                 data::Acuity positive) {
  if (scores.size() != truth.size()) throw DimensionError("scores and truth differ in length");
  std::size_t n_pos = 0;
  for (auto t : truth) n_pos += t == positive ? 1 : 0;
  const std::size_t n_neg = truth.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw DataError("ROC needs both positive and negative examples for class " +
                    std::to_string(data::level(positive)));
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.positive = positive;
  curve.points.push_back({0.0, 0.0});
  // Twice the area in units of (1 negative) x (1 positive), kept integral so
  // the result equals the pairwise-concordance count exactly.
  unsigned long long twice_area = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    std::size_t dtp = 0;
    std::size_t dfp = 0;
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      (truth[order[i]] == positive ? dtp : dfp) += 1;
    }
    twice_area += static_cast<unsigned long long>(dfp) * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                            static_cast<double>(tp) / static_cast<double>(n_pos)});
  }
  curve.auc = static_cast<double>(twice_area) /
              (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
  return curve;
}

std::string roc_to_csv(std::span<const RocCurve> curves) {
  std::string out = "class,fpr,tpr\n";
  char buf[32];
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out += std::to_string(data::level(c.positive));
      out += ',';
      out.append(buf, std::to_chars(buf, buf + sizeof buf, p.fpr).ptr);
      out += ',';
      out.append(buf, std::to_chars(buf, buf + sizeof buf, p.tpr).ptr);
      out += '\n';
    }
  }
  return out;
}

}  // namespace artemis::eval
