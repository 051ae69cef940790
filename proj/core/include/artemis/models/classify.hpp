#pragma once

#include <functional>
#include <span>

#include "artemis/data/vitals.hpp"
#include "artemis/models/ensemble.hpp"
#include "artemis/models/mlp.hpp"
#include "artemis/models/serialize.hpp"
#include "artemis/models/tree.hpp"

namespace artemis::models {

// Vitals -> label for a deployed network: bounds check, feature extraction,
// normalization, forward pass. Throws OutOfRangeError on implausible vitals
// (a sensor fault in the field) and ConfigError when the model carries no
// normalizer.
TriageLabel classify_vitals(const MlpModel& model, const data::VitalSigns& vitals,
                            const data::OutlierBounds& bounds = data::kDefaultBounds);

TriageLabel classify_vitals(const DecisionTree& tree, const data::VitalSigns& vitals,
                            const data::OutlierBounds& bounds = data::kDefaultBounds);
TriageLabel classify_vitals(const EnsembleModel& ensemble, const data::VitalSigns& vitals,
                            const data::OutlierBounds& bounds = data::kDefaultBounds);
TriageLabel classify_vitals(const AnyModel& model, const data::VitalSigns& vitals,
                            const data::OutlierBounds& bounds = data::kDefaultBounds);

// Label for an already-normalized feature row.
TriageLabel label_row(const AnyModel& model, std::span<const double> features);

// Uniform view over the three model kinds for evaluation code.
using Predictor = std::function<Acuity(std::span<const double>)>;

Predictor make_predictor(const MlpModel& model);
Predictor make_predictor(const DecisionTree& tree);
Predictor make_predictor(const EnsembleModel& ensemble);

}  // namespace artemis::models
