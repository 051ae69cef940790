#include "artemis/pipeline/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <set>

#include "artemis/data/analysis.hpp"
#include "artemis/data/io.hpp"
#include "artemis/data/normalize.hpp"
#include "artemis/data/preprocess.hpp"
#include "artemis/data/rules.hpp"
#include "artemis/data/synth.hpp"
#include "artemis/error.hpp"
#include "artemis/eval/compare.hpp"
#include "artemis/eval/metrics.hpp"
#include "artemis/eval/roc.hpp"
#include "artemis/json_io.hpp"
#include "artemis/models/classify.hpp"
#include "artemis/models/ensemble.hpp"
#include "artemis/models/serialize.hpp"
#include "artemis/pipeline/digest.hpp"
#include "artemis/random.hpp"
#include "artemis/sim/mission.hpp"
#include "artemis/sim/scenario.hpp"

namespace artemis::pipeline {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 8> kStageNames = {
    "preprocess", "rebalance", "synthesize", "analyze", "train", "evaluate", "compare", "simulate"};
constexpr std::array<std::string_view, 3> kKindNames = {"mlp", "tree", "ensemble"};

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw DataError("required input '" + p.string() + "' does not exist");
}

void write_text(const fs::path& path, std::string_view text, Outputs& out) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  out.push_back(path);
  f << text;
  if (!f.flush()) throw Error("write to '" + path.string() + "' failed");
}

void write_json_artifact(const fs::path& path, const json& value, Outputs& out) {
  out.push_back(path);
  write_json(path, value);
}

void write_records_artifact(const fs::path& path, std::span<const data::TriageRecord> records,
                            Outputs& out) {
  out.push_back(path);
  data::write_records(path, records);
}

// Pipeline-internal tables carry no malformed rows; anything rejected here is
// a corrupted or foreign input.
std::vector<data::TriageRecord> load_clean(const fs::path& path) {
  require_file(path);
  auto loaded = data::load_records(path);
  if (!loaded.diagnostics.empty()) {
    const auto& d = loaded.diagnostics.front();
    throw DataError("'" + path.string() + "' row " + std::to_string(d.row) + " (" + d.column +
                    "): " + d.message);
  }
  return std::move(loaded.records);
}

std::vector<data::Acuity> labels_of(std::span<const data::TriageRecord> records,
                                    const fs::path& source) {
  std::vector<data::Acuity> labels;
  labels.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].acuity) {
      throw DataError("'" + source.string() + "' row " + std::to_string(i + 1) + " has no acuity");
    }
    labels.push_back(*records[i].acuity);
  }
  return labels;
}

models::Dataset make_dataset(std::span<const data::TriageRecord> records,
                             const data::NormalizationParams& normalizer, const fs::path& source) {
  models::Dataset d;
  d.features = data::apply_normalizer(normalizer, records);
  d.labels = labels_of(records, source);
  return d;
}

std::string what_of(std::exception_ptr e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

// Wraps json type/key errors as configuration errors naming the section.
template <typename F>
void section(const json& j, std::string_view name, std::initializer_list<std::string_view> keys,
             F&& body) {
  if (!j.contains(name)) return;
  const auto& s = j.at(std::string(name));
  if (!s.is_object()) throw ConfigError("manifest '" + std::string(name) + "' must be an object");
  for (const auto& [k, _] : s.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw ConfigError("manifest '" + std::string(name) + "' has unknown key '" + k + "'");
    }
  }
  try {
    body(s);
  } catch (const json::exception& e) {
    throw ConfigError("manifest '" + std::string(name) + "': " + e.what());
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : (base / path).lexically_normal();
}

data::Feature feature_or_throw(const std::string& name) {
  auto f = data::feature_from_name(name);
  if (!f) throw ConfigError("unknown feature '" + name + "'");
  return *f;
}

json path_json(const std::optional<fs::path>& p) {
  return p ? json(p->generic_string()) : json(nullptr);
}

}  // namespace

std::string_view stage_name(Stage stage) noexcept {
  return kStageNames[static_cast<std::size_t>(stage)];
}

Stage stage_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kStageNames.size(); ++i) {
    if (kStageNames[i] == name) return static_cast<Stage>(i);
  }
  throw ConfigError("unknown stage '" + std::string(name) + "'");
}

std::string_view kind_name(ModelKind kind) noexcept {
  return kKindNames[static_cast<std::size_t>(kind)];
}

ModelKind kind_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<ModelKind>(i);
  }
  throw ConfigError("unknown model kind '" + std::string(name) + "' (expected mlp, tree or ensemble)");
}

RunManifest manifest_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("manifest must be a JSON object");
  static const std::set<std::string> kTop = {"seed",    "input",   "output_dir", "stages",
                                             "synthesize", "analyze", "train",   "compare",
                                             "simulate"};
  for (const auto& [k, _] : j.items()) {
    if (!kTop.contains(k)) throw ConfigError("manifest has unknown key '" + k + "'");
  }
  RunManifest m;
  try {
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("input") && !j.at("input").is_null()) {
      m.input = resolve(base_dir, j.at("input").get<std::string>());
    }
    if (j.contains("output_dir")) m.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
    if (!j.contains("stages")) throw ConfigError("manifest lists no stages");
    for (const auto& s : j.at("stages")) m.stages.push_back(stage_from_name(s.get<std::string>()));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  if (m.stages.empty()) throw ConfigError("manifest lists no stages");

  section(j, "synthesize", {"count", "rules"}, [&](const json& s) {
    if (s.contains("count")) m.synthesize.count = s.at("count").get<std::size_t>();
    if (s.contains("rules") && !s.at("rules").is_null()) {
      m.synthesize.rules = resolve(base_dir, s.at("rules").get<std::string>());
    }
  });
  section(j, "analyze", {"bin_feature", "bin_width"}, [&](const json& s) {
    if (s.contains("bin_feature")) m.analyze.bin_feature = feature_or_throw(s.at("bin_feature").get<std::string>());
    if (s.contains("bin_width")) m.analyze.bin_width = s.at("bin_width").get<double>();
  });
  section(j, "train",
          {"kinds", "split_ratio", "features", "hidden", "learning_rate", "batch_size", "epochs",
           "max_depth", "min_samples"},
          [&](const json& s) {
            if (s.contains("kinds")) {
              m.train.kinds.clear();
              for (const auto& k : s.at("kinds")) m.train.kinds.push_back(kind_from_name(k.get<std::string>()));
            }
            if (s.contains("split_ratio")) m.train.split_ratio = s.at("split_ratio").get<double>();
            if (s.contains("features")) {
              m.train.features.clear();
              for (const auto& f : s.at("features")) m.train.features.push_back(feature_or_throw(f.get<std::string>()));
            }
            if (s.contains("hidden")) m.train.hidden = s.at("hidden").get<std::vector<std::size_t>>();
            if (s.contains("learning_rate")) m.train.mlp.learning_rate = s.at("learning_rate").get<double>();
            if (s.contains("batch_size")) m.train.mlp.batch_size = s.at("batch_size").get<std::size_t>();
            if (s.contains("epochs")) m.train.mlp.epochs = s.at("epochs").get<std::size_t>();
            if (s.contains("max_depth") && !s.at("max_depth").is_null()) {
              m.train.tree.max_depth = s.at("max_depth").get<std::size_t>();
            }
            if (s.contains("min_samples")) m.train.tree.min_samples = s.at("min_samples").get<std::size_t>();
          });
  section(j, "compare", {"model_a", "model_b", "n_subsets", "subset_fraction"}, [&](const json& s) {
    if (s.contains("model_a")) m.compare.model_a = kind_from_name(s.at("model_a").get<std::string>());
    if (s.contains("model_b")) m.compare.model_b = kind_from_name(s.at("model_b").get<std::string>());
    if (s.contains("n_subsets")) m.compare.n_subsets = s.at("n_subsets").get<std::size_t>();
    if (s.contains("subset_fraction")) m.compare.subset_fraction = s.at("subset_fraction").get<double>();
  });
  section(j, "simulate", {"scenario", "model", "step_dt", "max_steps", "server_url"},
          [&](const json& s) {
            if (s.contains("scenario") && !s.at("scenario").is_null()) m.simulate.scenario = resolve(base_dir, s.at("scenario").get<std::string>());
            if (s.contains("model")) m.simulate.model = kind_from_name(s.at("model").get<std::string>());
            if (s.contains("step_dt")) m.simulate.step_dt = s.at("step_dt").get<double>();
            if (s.contains("max_steps")) m.simulate.max_steps = s.at("max_steps").get<std::size_t>();
            if (s.contains("server_url") && !s.at("server_url").is_null()) {
              m.simulate.server_url = s.at("server_url").get<std::string>();
            }
          });

  if (m.synthesize.count == 0) throw ConfigError("synthesize.count must be positive");
  if (!(m.analyze.bin_width > 0.0)) throw ConfigError("analyze.bin_width must be positive");
  if (!(m.train.split_ratio > 0.0 && m.train.split_ratio < 1.0)) {
    throw ConfigError("train.split_ratio must lie in (0, 1)");
  }
  if (m.train.kinds.empty()) throw ConfigError("train.kinds is empty");
  if (m.train.features.empty()) throw ConfigError("train.features is empty");
  m.train.mlp.validate();
  if (m.compare.n_subsets == 0) throw ConfigError("compare.n_subsets must be positive");
  if (!(m.compare.subset_fraction > 0.0 && m.compare.subset_fraction <= 1.0)) {
    throw ConfigError("compare.subset_fraction must lie in (0, 1]");
  }
  if (!(m.simulate.step_dt > 0.0)) throw ConfigError("simulate.step_dt must be positive");
  return m;
}

RunManifest load_manifest(const fs::path& path) {
  // The manifest is configuration, so every failure to read it is a ConfigError.
  if (!fs::is_regular_file(path)) throw ConfigError("manifest '" + path.string() + "' does not exist");
  json j;
  try {
    j = read_json(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return manifest_from_json(j, path.parent_path());
}

json to_json(const RunManifest& m) {
  json stages = json::array();
  for (auto s : m.stages) stages.push_back(stage_name(s));
  json kinds = json::array();
  for (auto k : m.train.kinds) kinds.push_back(kind_name(k));
  json features = json::array();
  for (auto f : m.train.features) features.push_back(data::feature_name(f));
  return {
      {"seed", m.seed},
      {"input", path_json(m.input)},
      {"output_dir", m.output_dir.generic_string()},
      {"stages", stages},
      {"synthesize", {{"count", m.synthesize.count}, {"rules", path_json(m.synthesize.rules)}}},
      {"analyze",
       {{"bin_feature", data::feature_name(m.analyze.bin_feature)},
        {"bin_width", m.analyze.bin_width}}},
      {"train",
       {{"kinds", kinds},
        {"split_ratio", m.train.split_ratio},
        {"features", features},
        {"hidden", m.train.hidden},
        {"learning_rate", m.train.mlp.learning_rate},
        {"batch_size", m.train.mlp.batch_size},
        {"epochs", m.train.mlp.epochs},
        {"max_depth", m.train.tree.max_depth ? json(*m.train.tree.max_depth) : json(nullptr)},
        {"min_samples", m.train.tree.min_samples}}},
      {"compare",
       {{"model_a", kind_name(m.compare.model_a)},
        {"model_b", kind_name(m.compare.model_b)},
        {"n_subsets", m.compare.n_subsets},
        {"subset_fraction", m.compare.subset_fraction}}},
      {"simulate",
       {{"scenario", path_json(m.simulate.scenario)},
        {"model", kind_name(m.simulate.model)},
        {"step_dt", m.simulate.step_dt},
        {"max_steps", m.simulate.max_steps},
        {"server_url", m.simulate.server_url ? json(*m.simulate.server_url) : json(nullptr)}}},
  };
}

int exit_code_for(std::exception_ptr error) noexcept {
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError&) {
    return 1;
  } catch (const DataError&) {
    return 2;
  } catch (...) {
    return 3;
  }
}

void preprocess_stage(const fs::path& input, const fs::path& out_dir, Outputs& out) {
  require_file(input);
  const auto loaded = data::load_records(input);
  const auto result = data::preprocess(loaded.records);
  json rejected = json::array();
  for (const auto& d : loaded.diagnostics) {
    rejected.push_back({{"row", d.row}, {"column", d.column}, {"message", d.message}});
  }
  const auto& r = result.report;
  write_records_artifact(out_dir / "clean.csv", result.kept, out);
  write_json_artifact(out_dir / "preprocess_report.json",
                      {{"input_count", r.input_count},
                       {"duplicate_count", r.duplicate_count},
                       {"missing_count", r.missing_count},
                       {"outlier_count", r.outlier_count},
                       {"output_count", r.output_count},
                       {"rejected_rows", rejected}},
                      out);
}

void rebalance_stage(const fs::path& input, std::uint64_t seed, const fs::path& out_dir,
                     Outputs& out) {
  const auto records = load_clean(input);
  const auto balanced = data::rebalance(records, derive_seed(seed, seed_offset::kRebalance));
  write_records_artifact(out_dir / "balanced.csv", balanced, out);
}

void synthesize_stage(const SynthesizeParams& params, std::uint64_t seed,
                      const fs::path& out_dir, Outputs& out) {
  data::RuleTable table = data::default_rule_table();
  if (params.rules) {
    require_file(*params.rules);
    table = data::rule_table_from_json(read_json(*params.rules));
  }
  const auto records =
      data::synthesize(params.count, data::reference_class_mix(), data::default_synthesis_noise(),
                       table, derive_seed(seed, seed_offset::kSynthesize));
  write_records_artifact(out_dir / "synthetic.csv", records, out);
}

void analyze_stage(const fs::path& input, const AnalyzeParams& params, const fs::path& out_dir,
                   Outputs& out) {
  const auto records = load_clean(input);
  const auto table = data::analysis_table(records, data::kAllFeatures);
  const auto corr = data::correlation_matrix(table.values, table.columns);
  const std::size_t target = table.columns.size() - 1;
  json matrix = json::array();
  json with_acuity = json::object();
  for (std::size_t r = 0; r < corr.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < corr.cols(); ++c) row.push_back(corr(r, c));
    matrix.push_back(row);
    if (r != target) with_acuity[table.columns[r]] = corr(r, target);
  }
  write_json_artifact(out_dir / "correlation.json",
                      {{"columns", table.columns}, {"matrix", matrix}, {"acuity_r", with_acuity}},
                      out);
  const auto bins = data::bin_distribution(records, params.bin_feature, params.bin_width);
  write_json_artifact(out_dir / "bins.json",
                      data::bins_to_json(bins, params.bin_feature, params.bin_width), out);
}

void split_stage(const fs::path& input, double ratio, std::uint64_t seed,
                 const fs::path& out_dir, Outputs& out) {
  const auto records = load_clean(input);
  const auto [train, test] = data::split<data::TriageRecord>(
      records, ratio, derive_seed(seed, seed_offset::kSplit));
  write_records_artifact(out_dir / "train.csv", train, out);
  write_records_artifact(out_dir / "test.csv", test, out);
}

void train_stage(const fs::path& train_csv, ModelKind kind, const TrainParams& params,
                 std::uint64_t seed, const fs::path& out_dir, Outputs& out) {
  const auto records = load_clean(train_csv);
  const fs::path model_path = out_dir / ("model_" + std::string(kind_name(kind)) + ".json");
  switch (kind) {
    case ModelKind::Mlp: {
      const auto norm = data::fit_normalizer(records, params.features);
      const auto train = make_dataset(records, norm, train_csv);
      const std::uint64_t s = derive_seed(seed, seed_offset::kTrainMlp);
      auto config = params.mlp;
      config.seed = derive_seed(s, 1);
      auto result = models::mlp_train(models::mlp_init(train.dims(), params.hidden, derive_seed(s, 0)),
                                      train, config);
      result.model.normalizer = norm;
      out.push_back(model_path);
      models::save_model(model_path, result.model);
      write_json_artifact(out_dir / "history_mlp.json", {{"loss", result.loss_history}}, out);
      break;
    }
    case ModelKind::Tree: {
      const auto norm = data::fit_normalizer(records, params.features);
      auto tree = models::tree_fit(make_dataset(records, norm, train_csv), params.tree);
      tree.normalizer = norm;
      out.push_back(model_path);
      models::save_model(model_path, tree);
      break;
    }
    case ModelKind::Ensemble: {
      const auto norm = data::fit_normalizer(records, data::kFiveFeatures);
      auto ensemble = models::ensemble_fit(make_dataset(records, norm, train_csv), params.mlp,
                                           derive_seed(seed, seed_offset::kTrainEnsemble));
      ensemble.normalizer = norm;
      out.push_back(model_path);
      models::save_model(model_path, ensemble);
      break;
    }
  }
}

void evaluate_stage(const fs::path& model_path, const fs::path& test_csv, std::string_view tag,
                    const fs::path& out_dir, Outputs& out) {
  require_file(model_path);
  const auto model = models::load_model(model_path);
  const auto records = load_clean(test_csv);
  const auto& norm = models::normalizer_of(model);
  if (norm.empty()) throw ConfigError("model '" + model_path.string() + "' has no normalizer");
  const auto test = make_dataset(records, norm, test_csv);

  std::vector<data::Acuity> predictions;
  std::array<std::vector<double>, data::kNumClasses> scores;
  predictions.reserve(test.size());
  for (std::size_t r = 0; r < test.size(); ++r) {
    const auto label = models::label_row(model, test.features.row(r));
    predictions.push_back(label.acuity);
    for (std::size_t k = 0; k < data::kNumClasses; ++k) scores[k].push_back(label.probabilities[k]);
  }
  const auto report = eval::evaluate(predictions, test.labels);

  std::vector<eval::RocCurve> curves;
  json auc = json::object();
  for (std::size_t k = 0; k < data::kNumClasses; ++k) {
    const auto positive = data::acuity_at(k);
    if (std::none_of(test.labels.begin(), test.labels.end(), [&](auto a) { return a == positive; }) ||
        std::all_of(test.labels.begin(), test.labels.end(), [&](auto a) { return a == positive; })) {
      auc[std::to_string(data::level(positive))] = nullptr;  // undefined with one class present
      continue;
    }
    curves.push_back(eval::roc_auc(scores[k], test.labels, positive));
    auc[std::to_string(data::level(positive))] = curves.back().auc;
  }

  auto metrics = eval::to_json(report);
  metrics["model"] = tag;
  metrics["auc"] = auc;
  const std::string stem = std::string(tag);
  write_json_artifact(out_dir / ("metrics_" + stem + ".json"), metrics, out);
  write_text(out_dir / ("metrics_" + stem + ".txt"), eval::format_table(report, tag), out);
  write_text(out_dir / ("roc_" + stem + ".csv"), eval::roc_to_csv(curves), out);
}

void compare_stage(const fs::path& model_a, const fs::path& model_b, const fs::path& test_csv,
                   const CompareParams& params, std::uint64_t seed, const fs::path& out_dir,
                   Outputs& out) {
  require_file(model_a);
  require_file(model_b);
  const auto a = models::load_model(model_a);
  const auto b = models::load_model(model_b);
  const auto records = load_clean(test_csv);
  // Each model sees its own normalization of the same rows.
  const auto data_a = make_dataset(records, models::normalizer_of(a), test_csv);
  const auto data_b = make_dataset(records, models::normalizer_of(b), test_csv);
  const std::size_t width_a = data_a.dims();

  // One combined matrix lets a single Dataset drive both predictors.
  models::Dataset joint;
  joint.labels = data_a.labels;
  joint.features = Matrix(records.size(), width_a + data_b.dims());
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (std::size_t c = 0; c < width_a; ++c) joint.features(r, c) = data_a.features(r, c);
    for (std::size_t c = 0; c < data_b.dims(); ++c) joint.features(r, width_a + c) = data_b.features(r, c);
  }
  const models::Predictor pa = [&](std::span<const double> x) {
    return models::label_row(a, x.first(width_a)).acuity;
  };
  const models::Predictor pb = [&](std::span<const double> x) {
    return models::label_row(b, x.subspan(width_a)).acuity;
  };

  eval::CompareConfig config;
  config.n_subsets = params.n_subsets;
  config.subset_fraction = params.subset_fraction;
  config.seed = derive_seed(seed, seed_offset::kCompare);
  const auto report = eval::compare_models(pa, pb, joint, config);

  auto j = eval::to_json(report);
  j["model_a"] = model_a.filename().generic_string();
  j["model_b"] = model_b.filename().generic_string();
  write_json_artifact(out_dir / "comparison.json", j, out);
  write_text(out_dir / "comparison.txt",
             eval::format_table(report, model_a.stem().string(), model_b.stem().string()), out);
}

void simulate_stage(const fs::path& scenario_path, const fs::path& model_path,
                    const SimulateParams& params, std::optional<std::uint64_t> seed,
                    const fs::path& out_dir, Outputs& out) {
  require_file(scenario_path);
  require_file(model_path);
  auto scenario = std::make_shared<sim::Scenario>(sim::load_scenario(scenario_path));
  if (seed) scenario->seed = *seed;
  const auto model = models::load_model(model_path);
  const sim::VitalsClassifier classify = [&](const data::VitalSigns& v) {
    return models::classify_vitals(model, v);
  };

  sim::MissionConfig config;
  config.step_dt = params.step_dt;
  config.max_steps = params.max_steps;
  sim::MissionLog log;
  if (params.server_url) {
    sim::HttpSink sink(*params.server_url);
    log = sim::run_mission(scenario, classify, sink, config);
  } else {
    sim::CollectingSink sink;
    log = sim::run_mission(scenario, classify, sink, config);
  }
  const fs::path log_path = out_dir / "mission_log.jsonl";
  out.push_back(log_path);
  sim::write_mission_log(log_path, log);

  if (!log.complete) {
    throw Error("mission stopped after " + std::to_string(log.steps) + " steps with " +
                std::to_string(scenario->victims.size() - log.entries.size()) +
                " victims unreported");
  }
  if (const auto missing = log.undelivered(); !missing.empty()) {
    throw Error(std::to_string(missing.size()) + " reports were not delivered to " +
                *params.server_url);
  }
}

RunResult run_pipeline(const RunManifest& m) {
  RunResult result;
  const fs::path dir = m.output_dir;
  fs::create_directories(dir);
  result.manifest_path = dir / "run_manifest.json";

  std::vector<Stage> stages = m.stages;
  std::sort(stages.begin(), stages.end());
  stages.erase(std::unique(stages.begin(), stages.end()), stages.end());

  std::optional<fs::path> dataset = m.input;
  const auto need_dataset = [&](Stage s) -> const fs::path& {
    if (!dataset) {
      throw ConfigError(std::string(stage_name(s)) +
                        " needs a dataset: set 'input' or run preprocess or synthesize");
    }
    return *dataset;
  };
  const auto model_file = [&](ModelKind k) {
    return dir / ("model_" + std::string(kind_name(k)) + ".json");
  };

  for (Stage stage : stages) {
    Outputs out;
    try {
      switch (stage) {
        case Stage::Preprocess:
          preprocess_stage(need_dataset(stage), dir, out);
          dataset = dir / "clean.csv";
          break;
        case Stage::Rebalance:
          rebalance_stage(need_dataset(stage), m.seed, dir, out);
          dataset = dir / "balanced.csv";
          break;
        case Stage::Synthesize:
          synthesize_stage(m.synthesize, m.seed, dir, out);
          dataset = dir / "synthetic.csv";
          break;
        case Stage::Analyze:
          analyze_stage(need_dataset(stage), m.analyze, dir, out);
          break;
        case Stage::Train:
          split_stage(need_dataset(stage), m.train.split_ratio, m.seed, dir, out);
          for (auto kind : m.train.kinds) train_stage(dir / "train.csv", kind, m.train, m.seed, dir, out);
          break;
        case Stage::Evaluate:
          for (auto kind : m.train.kinds) {
            evaluate_stage(model_file(kind), dir / "test.csv", kind_name(kind), dir, out);
          }
          break;
        case Stage::Compare:
          compare_stage(model_file(m.compare.model_a), model_file(m.compare.model_b),
                        dir / "test.csv", m.compare, m.seed, dir, out);
          break;
        case Stage::Simulate:
          if (!m.simulate.scenario) throw ConfigError("simulate needs a scenario path");
          simulate_stage(*m.simulate.scenario, model_file(m.simulate.model), m.simulate,
                         std::nullopt, dir, out);
          break;
      }
    } catch (...) {
      result.exit_code = exit_code_for(std::current_exception());
      result.failed_stage = stage;
      result.error = what_of(std::current_exception());
      for (const auto& p : out) {
        if (!fs::exists(p)) continue;
        fs::path partial = p;
        partial += ".partial";
        fs::rename(p, partial);
        result.artifacts.push_back({stage, partial, sha256_file(partial), true});
      }
      break;
    }
    for (const auto& p : out) result.artifacts.push_back({stage, p, sha256_file(p), false});
  }

  json artifacts = json::array();
  for (const auto& a : result.artifacts) {
    artifacts.push_back({{"stage", stage_name(a.stage)},
                         {"path", a.path.lexically_relative(dir).generic_string()},
                         {"sha256", a.sha256},
                         {"partial", a.partial}});
  }
  json record = {{"manifest", to_json(m)},
                 {"status", result.failed_stage ? "failed" : "complete"},
                 {"artifacts", artifacts}};
  if (result.failed_stage) {
    record["failed_stage"] = stage_name(*result.failed_stage);
    record["error"] = result.error;
    record["exit_code"] = result.exit_code;
  }
  write_json(result.manifest_path, record);
  return result;
}

}  // namespace artemis::pipeline
