#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "artemis/models/mlp.hpp"

namespace artemis::models {

using FeaturePair = std::pair<std::size_t, std::size_t>;

inline constexpr std::size_t kEnsembleFeatures = 5;
inline constexpr std::array<std::size_t, 2> kWeakLearnerWidths = {16, 16};

// A small network that sees only two of the five inputs.
struct WeakLearner {
  FeaturePair features;
  MlpModel net;
  bool operator==(const WeakLearner&) const = default;
};

struct EnsembleModel {
  std::vector<WeakLearner> learners;
  data::NormalizationParams normalizer;
  bool operator==(const EnsembleModel&) const = default;
};

// Distinct unordered pairs of 0..n-1 in lexicographic order.
std::vector<FeaturePair> feature_pairs(std::size_t n);

// One weak learner per pair of the five input columns. Learner k is
// initialised and trained from seeds derived from `seed` and k;
// `config.seed` is ignored.
EnsembleModel ensemble_fit(const Dataset& train, const TrainConfig& config, std::uint64_t seed);

// Plurality of the learners' argmax votes. Tied classes are separated by their
// summed probabilities, then by severity.
Acuity combine_votes(std::span<const TriageLabel> votes);

std::vector<TriageLabel> ensemble_votes(const EnsembleModel& model, std::span<const double> features);
Acuity ensemble_predict(const EnsembleModel& model, std::span<const double> features);
// Voted acuity with the learners' mean probabilities.
TriageLabel ensemble_label(const EnsembleModel& model, std::span<const double> features);
std::vector<Acuity> ensemble_predict(const EnsembleModel& model, const Matrix& features);

}  // namespace artemis::models
