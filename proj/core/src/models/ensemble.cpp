#include "artemis/models/ensemble.hpp"

#include "artemis/error.hpp"
#include "artemis/random.hpp"

namespace artemis::models {

std::vector<FeaturePair> feature_pairs(std::size_t n) {
  std::vector<FeaturePair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

EnsembleModel ensemble_fit(const Dataset& train, const TrainConfig& config, std::uint64_t seed) {
  if (train.dims() != kEnsembleFeatures) {
    throw DimensionError("ensemble needs exactly 5 features, got " + std::to_string(train.dims()));
  }
  EnsembleModel model;
  const auto pairs = feature_pairs(kEnsembleFeatures);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const std::array<std::size_t, 2> cols = {pairs[k].first, pairs[k].second};
    Dataset view{train.features.select_cols(cols), train.labels};
    TrainConfig learner_config = config;
    learner_config.seed = derive_seed(seed, 2 * k + 1);
    auto net = make_mlp(2, kWeakLearnerWidths, derive_seed(seed, 2 * k));
    model.learners.push_back({pairs[k], mlp_train(std::move(net), view, learner_config).model});
  }
  return model;
}

Acuity combine_votes(std::span<const TriageLabel> votes) {
  if (votes.empty()) throw DataError("no votes to combine");
  std::array<std::size_t, kNumClasses> tally{};
  Probabilities mass{};
  for (const auto& v : votes) {
    ++tally[data::class_index(v.acuity)];
    for (std::size_t j = 0; j < kNumClasses; ++j) mass[j] += v.probabilities[j];
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < kNumClasses; ++j) {
    if (tally[j] > tally[best] || (tally[j] == tally[best] && mass[j] > mass[best])) best = j;
  }
  return data::acuity_at(best);
}

std::vector<TriageLabel> ensemble_votes(const EnsembleModel& model,
                                        std::span<const double> features) {
  if (features.size() != kEnsembleFeatures) {
    throw DimensionError("ensemble expects a 5-feature vector");
  }
  std::vector<TriageLabel> votes;
  votes.reserve(model.learners.size());
  for (const auto& learner : model.learners) {
    const std::array<double, 2> x = {features[learner.features.first],
                                     features[learner.features.second]};
    votes.push_back(mlp_forward(learner.net, x));
  }
  return votes;
}

TriageLabel ensemble_label(const EnsembleModel& model, std::span<const double> features) {
  const auto votes = ensemble_votes(model, features);
  TriageLabel label;
  label.acuity = combine_votes(votes);
  for (const auto& v : votes) {
    for (std::size_t k = 0; k < kNumClasses; ++k) label.probabilities[k] += v.probabilities[k];
  }
  if (!votes.empty()) {
    for (auto& p : label.probabilities) p /= static_cast<double>(votes.size());
  }
  return label;
}

Acuity ensemble_predict(const EnsembleModel& model, std::span<const double> features) {
  return combine_votes(ensemble_votes(model, features));
}

std::vector<Acuity> ensemble_predict(const EnsembleModel& model, const Matrix& features) {
  std::vector<Acuity> out;
  out.reserve(features.rows());
  for (std::size_t r = 0; r < features.rows(); ++r) {
    out.push_back(ensemble_predict(model, features.row(r)));
  }
  return out;
}

}  // namespace artemis::models
