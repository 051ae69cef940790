#include "artemis/models/classify.hpp"

#include <type_traits>

#include "artemis/error.hpp"

namespace artemis::models {

namespace {

std::vector<double> checked_input(const data::NormalizationParams& normalizer,
                                  const data::VitalSigns& vitals,
                                  const data::OutlierBounds& bounds) {
  if (!bounds.contains(vitals)) {
    std::string names;
    for (const auto& n : bounds.violations(vitals)) names += (names.empty() ? "" : ", ") + n;
    throw OutOfRangeError("implausible vitals (sensor fault?): " + names);
  }
  if (normalizer.empty()) throw ConfigError("model carries no normalization parameters");
  return data::apply_normalizer(normalizer, vitals);
}

}  // namespace

TriageLabel classify_vitals(const MlpModel& model, const data::VitalSigns& vitals,
                            const data::OutlierBounds& bounds) {
  return mlp_forward(model, checked_input(model.normalizer, vitals, bounds));
}

TriageLabel classify_vitals(const DecisionTree& tree, const data::VitalSigns& vitals,
                            const data::OutlierBounds& bounds) {
  return tree_label(tree, checked_input(tree.normalizer, vitals, bounds));
}

TriageLabel classify_vitals(const EnsembleModel& ensemble, const data::VitalSigns& vitals,
                            const data::OutlierBounds& bounds) {
  return ensemble_label(ensemble, checked_input(ensemble.normalizer, vitals, bounds));
}

TriageLabel label_row(const AnyModel& model, std::span<const double> features) {
  return std::visit(
      [&](const auto& m) -> TriageLabel {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, MlpModel>) {
          return mlp_forward(m, features);
        } else if constexpr (std::is_same_v<M, DecisionTree>) {
          return tree_label(m, features);
        } else {
          return ensemble_label(m, features);
        }
      },
      model);
}

TriageLabel classify_vitals(const AnyModel& model, const data::VitalSigns& vitals,
                            const data::OutlierBounds& bounds) {
  return std::visit([&](const auto& m) { return classify_vitals(m, vitals, bounds); }, model);
}

Predictor make_predictor(const MlpModel& model) {
  return [&model](std::span<const double> x) { return mlp_forward(model, x).acuity; };
}

Predictor make_predictor(const DecisionTree& tree) {
  return [&tree](std::span<const double> x) { return tree_predict(tree, x); };
}

Predictor make_predictor(const EnsembleModel& ensemble) {
  return [&ensemble](std::span<const double> x) { return ensemble_predict(ensemble, x); };
}

}  // namespace artemis::models
