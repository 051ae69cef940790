#include "artemis/models/serialize.hpp"

#include "artemis/error.hpp"
#include "artemis/json_io.hpp"

namespace artemis::models {

namespace {

using nlohmann::json;

void expect_format(const json& j, std::string_view format) {
  const auto found = j.value("format", std::string{});
  if (found != format) {
    throw DataError("expected model format '" + std::string(format) + "', found '" + found + "'");
  }
}

json layers_to_json(const MlpModel& model) {
  json layers = json::array();
  for (const auto& l : model.layers) {
    layers.push_back({{"rows", l.weights.rows()},
                      {"cols", l.weights.cols()},
                      {"weights", l.weights.values()},
                      {"bias", l.bias}});
  }
  return layers;
}

MlpModel net_from_json(const json& j) {
  MlpModel model;
  model.seed = j.value("seed", std::uint64_t{0});
  std::size_t expected_in = 0;
  for (const auto& jl : j.at("layers")) {
    const auto rows = jl.at("rows").get<std::size_t>();
    const auto cols = jl.at("cols").get<std::size_t>();
    DenseLayer layer{Matrix(rows, cols, jl.at("weights").get<std::vector<double>>()),
                     jl.at("bias").get<std::vector<double>>()};
    if (layer.bias.size() != cols) throw DataError("bias length does not match layer width");
    if (expected_in != 0 && rows != expected_in) throw DataError("layer dimensions disagree");
    expected_in = cols;
    model.layers.push_back(std::move(layer));
  }
  if (model.layers.empty() || model.layers.back().fan_out() != kNumClasses) {
    throw DataError("network output layer must have width 5");
  }
  if (j.contains("layer_sizes") && j.at("layer_sizes").get<std::vector<std::size_t>>() !=
                                       model.layer_sizes()) {
    throw DataError("layer_sizes does not match the stored layers");
  }
  return model;
}

json net_to_json(const MlpModel& model) {
  return {{"layer_sizes", model.layer_sizes()},
          {"seed", model.seed},
          {"layers", layers_to_json(model)}};
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace

json to_json(const data::NormalizationParams& params) {
  json features = json::array();
  for (auto f : params.features) features.push_back(data::feature_name(f));
  return {{"features", features}, {"mean", params.mean}, {"std", params.stddev}};
}

data::NormalizationParams normalizer_from_json(const json& j) {
  return guarded([&] {
    data::NormalizationParams p;
    const auto names = j.at("features").get<std::vector<std::string>>();
    p.features = data::parse_feature_list(names);
    p.mean = j.at("mean").get<std::vector<double>>();
    p.stddev = j.at("std").get<std::vector<double>>();
    if (p.mean.size() != p.features.size() || p.stddev.size() != p.features.size()) {
      throw DataError("normalizer arrays do not match the feature list");
    }
    for (double s : p.stddev) {
      if (!(s > 0.0)) throw DataError("normalizer std must be positive");
    }
    return p;
  });
}

json to_json(const MlpModel& model) {
  json j = net_to_json(model);
  j["format"] = kMlpFormat;
  j["normalizer"] = to_json(model.normalizer);
  return j;
}

MlpModel mlp_from_json(const json& j) {
  expect_format(j, kMlpFormat);
  return guarded([&] {
    MlpModel model = net_from_json(j);
    if (j.contains("normalizer")) model.normalizer = normalizer_from_json(j.at("normalizer"));
    if (!model.normalizer.empty() && model.normalizer.features.size() != model.input_dim()) {
      throw DataError("normalizer feature count does not match the input layer");
    }
    return model;
  });
}

json to_json(const DecisionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    if (n.is_leaf()) {
      nodes.push_back({{"counts", n.counts}, {"prediction", data::level(n.prediction)}});
    } else {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"counts", n.counts},
                       {"prediction", data::level(n.prediction)}});
    }
  }
  return {{"format", kTreeFormat},
          {"n_features", tree.n_features},
          {"normalizer", to_json(tree.normalizer)},
          {"nodes", nodes}};
}

DecisionTree tree_from_json(const json& j) {
  expect_format(j, kTreeFormat);
  return guarded([&] {
    DecisionTree tree;
    tree.n_features = j.at("n_features").get<std::size_t>();
    if (j.contains("normalizer")) tree.normalizer = normalizer_from_json(j.at("normalizer"));
    const auto& jn = j.at("nodes");
    const auto n_nodes = static_cast<int>(jn.size());
    for (const auto& n : jn) {
      TreeNode node;
      node.counts = n.at("counts").get<ClassCounts>();
      node.prediction = data::acuity_from_level(n.at("prediction").get<int>());
      if (n.contains("feature")) {
        node.feature = n.at("feature").get<int>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<int>();
        node.right = n.at("right").get<int>();
        if (node.left <= 0 || node.right <= 0 || node.left >= n_nodes || node.right >= n_nodes ||
            node.feature >= static_cast<int>(tree.n_features)) {
          throw DataError("tree node references out of range");
        }
      }
      tree.nodes.push_back(node);
    }
    if (tree.nodes.empty()) throw DataError("tree has no nodes");
    return tree;
  });
}

json to_json(const EnsembleModel& ensemble) {
  json learners = json::array();
  for (const auto& l : ensemble.learners) {
    json jl = net_to_json(l.net);
    jl["features"] = {l.features.first, l.features.second};
    learners.push_back(std::move(jl));
  }
  return {{"format", kEnsembleFormat},
          {"normalizer", to_json(ensemble.normalizer)},
          {"learners", learners}};
}

EnsembleModel ensemble_from_json(const json& j) {
  expect_format(j, kEnsembleFormat);
  return guarded([&] {
    EnsembleModel model;
    if (j.contains("normalizer")) model.normalizer = normalizer_from_json(j.at("normalizer"));
    for (const auto& jl : j.at("learners")) {
      const auto pair = jl.at("features").get<std::array<std::size_t, 2>>();
      model.learners.push_back({{pair[0], pair[1]}, net_from_json(jl)});
    }
    if (model.learners.size() != feature_pairs(kEnsembleFeatures).size()) {
      throw DataError("ensemble must hold exactly 10 learners");
    }
    return model;
  });
}

AnyModel model_from_json(const json& j) {
  const auto format = j.value("format", std::string{});
  if (format == kMlpFormat) return mlp_from_json(j);
  if (format == kTreeFormat) return tree_from_json(j);
  if (format == kEnsembleFormat) return ensemble_from_json(j);
  throw DataError("unknown model format '" + format + "'");
}

AnyModel load_model(const std::filesystem::path& path) { return model_from_json(read_json(path)); }

void save_model(const std::filesystem::path& path, const AnyModel& model) {
  write_json(path, std::visit([](const auto& m) { return to_json(m); }, model));
}

const data::NormalizationParams& normalizer_of(const AnyModel& model) {
  return std::visit(
      [](const auto& m) -> const data::NormalizationParams& { return m.normalizer; }, model);
}

}  // namespace artemis::models
