#include "artemis/models/tree.hpp"

#include <algorithm>
#include <utility>

#include "artemis/error.hpp"

namespace artemis::models {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // sum over children of (sum_c n_c^2) / n_child; larger is purer
};

double purity_score(const ClassCounts& counts, std::size_t n) noexcept {
  if (n == 0) return 0.0;
  double sq = 0.0;
  for (auto c : counts) sq += static_cast<double>(c) * static_cast<double>(c);
  return sq / static_cast<double>(n);
}

struct Work {
  int node;
  std::size_t begin;
  std::size_t end;
  std::size_t depth;
};

class Builder {
 public:
  Builder(const Dataset& data, const TreeConfig& config) : data_(data), config_(config) {}

  DecisionTree build() {
    DecisionTree tree;
    tree.n_features = data_.dims();
    std::vector<std::size_t> idx(data_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    tree.nodes.emplace_back();
    std::vector<Work> stack{{0, 0, idx.size(), 0}};
    while (!stack.empty()) {
      const Work w = stack.back();
      stack.pop_back();
      TreeNode& node = tree.nodes[static_cast<std::size_t>(w.node)];
      node.counts = count(idx, w.begin, w.end);
      node.prediction = majority_class(node.counts);

      const std::size_t n = w.end - w.begin;
      const bool pure = std::ranges::count_if(node.counts, [](auto c) { return c > 0; }) <= 1;
      if (pure || n < config_.min_samples || (config_.max_depth && w.depth >= *config_.max_depth)) {
        continue;
      }
      const Split best = find_split(idx, w.begin, w.end);
      if (best.feature < 0) continue;

      const auto f = static_cast<std::size_t>(best.feature);
      const auto mid_it = std::stable_partition(
          idx.begin() + static_cast<std::ptrdiff_t>(w.begin),
          idx.begin() + static_cast<std::ptrdiff_t>(w.end),
          [&](std::size_t i) { return data_.features(i, f) < best.threshold; });
      const auto mid = static_cast<std::size_t>(mid_it - idx.begin());

      const int left = static_cast<int>(tree.nodes.size());
      const int right = left + 1;
      // Re-index: emplace_back below invalidates `node`.
      tree.nodes[static_cast<std::size_t>(w.node)].feature = best.feature;
      tree.nodes[static_cast<std::size_t>(w.node)].threshold = best.threshold;
      tree.nodes[static_cast<std::size_t>(w.node)].left = left;
      tree.nodes[static_cast<std::size_t>(w.node)].right = right;
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      stack.push_back({right, mid, w.end, w.depth + 1});
      stack.push_back({left, w.begin, mid, w.depth + 1});
    }
    return tree;
  }

 private:
  ClassCounts count(const std::vector<std::size_t>& idx, std::size_t begin, std::size_t end) const {
    ClassCounts c{};
    for (std::size_t k = begin; k < end; ++k) ++c[data::class_index(data_.labels[idx[k]])];
    return c;
  }

  Split find_split(const std::vector<std::size_t>& idx, std::size_t begin, std::size_t end) {
    Split best;
    const std::size_t n = end - begin;
    const ClassCounts total = count(idx, begin, end);
    for (std::size_t f = 0; f < data_.dims(); ++f) {
      column_.clear();
      for (std::size_t k = begin; k < end; ++k) {
        column_.emplace_back(data_.features(idx[k], f), data::class_index(data_.labels[idx[k]]));
      }
      std::ranges::sort(column_);
      ClassCounts left{};
      ClassCounts right = total;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        ++left[column_[k].second];
        --right[column_[k].second];
        const double lo = column_[k].first;
        const double hi = column_[k + 1].first;
        if (lo == hi) continue;
        const double score = purity_score(left, k + 1) + purity_score(right, n - k - 1);
        if (best.feature >= 0 && score <= best.score + 1e-12 * best.score) continue;
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold > lo)) threshold = hi;
        best = {static_cast<int>(f), threshold, score};
      }
    }
    return best;
  }

  const Dataset& data_;
  const TreeConfig& config_;
  std::vector<std::pair<double, std::size_t>> column_;
};

}  // namespace

Acuity majority_class(const ClassCounts& counts) noexcept {
  std::size_t best = 0;
  for (std::size_t j = 1; j < kNumClasses; ++j) {
    if (counts[j] > counts[best]) best = j;
  }
  return data::acuity_at(best);
}

double gini_impurity(const ClassCounts& counts) noexcept {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) return 0.0;
  double sum_sq = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

double gini_impurity(std::span<const Acuity> labels) {
  if (labels.empty()) throw DataError("gini impurity of an empty label set");
  ClassCounts counts{};
  for (auto a : labels) ++counts[data::class_index(a)];
  return gini_impurity(counts);
}

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::size_t deepest = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const auto& node = nodes[static_cast<std::size_t>(i)];
    if (!node.is_leaf()) {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const noexcept {
  return static_cast<std::size_t>(
      std::ranges::count_if(nodes, [](const TreeNode& n) { return n.is_leaf(); }));
}

DecisionTree tree_fit(const Dataset& train, const TreeConfig& config) {
  if (train.size() == 0) throw DataError("cannot fit a tree on an empty set");
  if (train.features.rows() != train.size()) throw DimensionError("feature/label count mismatch");
  return Builder(train, config).build();
}

const TreeNode& tree_leaf(const DecisionTree& tree, std::span<const double> features) {
  if (tree.nodes.empty()) throw DimensionError("empty tree");
  std::size_t i = 0;
  while (!tree.nodes[i].is_leaf()) {
    const auto& node = tree.nodes[i];
    const auto f = static_cast<std::size_t>(node.feature);
    if (f >= features.size()) {
      throw DimensionError("tree uses feature " + std::to_string(f) + " but vector has " +
                           std::to_string(features.size()));
    }
    i = static_cast<std::size_t>(features[f] < node.threshold ? node.left : node.right);
  }
  return tree.nodes[i];
}

Acuity tree_predict(const DecisionTree& tree, std::span<const double> features) {
  return tree_leaf(tree, features).prediction;
}

TriageLabel tree_label(const DecisionTree& tree, std::span<const double> features) {
  const auto& leaf = tree_leaf(tree, features);
  std::size_t total = 0;
  for (auto c : leaf.counts) total += c;
  TriageLabel label;
  label.acuity = leaf.prediction;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    label.probabilities[k] =
        total == 0 ? 0.0 : static_cast<double>(leaf.counts[k]) / static_cast<double>(total);
  }
  return label;
}

std::vector<Acuity> tree_predict(const DecisionTree& tree, const Matrix& features) {
  std::vector<Acuity> out;
  out.reserve(features.rows());
  for (std::size_t r = 0; r < features.rows(); ++r) out.push_back(tree_predict(tree, features.row(r)));
  return out;
}

}  // namespace artemis::models
