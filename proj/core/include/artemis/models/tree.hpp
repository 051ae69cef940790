#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "artemis/data/normalize.hpp"
#include "artemis/models/mlp.hpp"

namespace artemis::models {

using ClassCounts = std::array<std::size_t, kNumClasses>;

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   // value < threshold
  int right = -1;  // value >= threshold
  ClassCounts counts{};
  Acuity prediction = Acuity::Minor;

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

// nodes[0] is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;
  std::size_t n_features = 0;
  data::NormalizationParams normalizer;

  std::size_t depth() const;
  std::size_t leaf_count() const noexcept;
  bool operator==(const DecisionTree&) const = default;
};

struct TreeConfig {
  std::optional<std::size_t> max_depth;  // unlimited when empty
  std::size_t min_samples = 2;           // a node with fewer samples becomes a leaf
};

// Most frequent class; ties go to the most severe.
Acuity majority_class(const ClassCounts& counts) noexcept;

double gini_impurity(const ClassCounts& counts) noexcept;
double gini_impurity(std::span<const Acuity> labels);

// Greedy CART on Gini impurity. Candidate thresholds are midpoints between
// consecutive distinct values; ties prefer the lower feature index, then the
// lower threshold.
DecisionTree tree_fit(const Dataset& train, const TreeConfig& config = {});

Acuity tree_predict(const DecisionTree& tree, std::span<const double> features);
std::vector<Acuity> tree_predict(const DecisionTree& tree, const Matrix& features);

const TreeNode& tree_leaf(const DecisionTree& tree, std::span<const double> features);
// Leaf prediction with the leaf's training class frequencies as probabilities.
TriageLabel tree_label(const DecisionTree& tree, std::span<const double> features);

}  // namespace artemis::models
