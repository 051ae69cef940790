#pragma once

#include <filesystem>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "artemis/models/ensemble.hpp"
#include "artemis/models/mlp.hpp"
#include "artemis/models/tree.hpp"

namespace artemis::models {

inline constexpr std::string_view kMlpFormat = "artemis-mlp/1";
inline constexpr std::string_view kTreeFormat = "artemis-tree/1";
inline constexpr std::string_view kEnsembleFormat = "artemis-ensemble/1";

nlohmann::json to_json(const data::NormalizationParams& params);
data::NormalizationParams normalizer_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MlpModel& model);
nlohmann::json to_json(const DecisionTree& tree);
nlohmann::json to_json(const EnsembleModel& ensemble);

MlpModel mlp_from_json(const nlohmann::json& j);
DecisionTree tree_from_json(const nlohmann::json& j);
EnsembleModel ensemble_from_json(const nlohmann::json& j);

using AnyModel = std::variant<MlpModel, DecisionTree, EnsembleModel>;

// Dispatches on the "format" field.
AnyModel model_from_json(const nlohmann::json& j);
AnyModel load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const AnyModel& model);

const data::NormalizationParams& normalizer_of(const AnyModel& model);

}  // namespace artemis::models
