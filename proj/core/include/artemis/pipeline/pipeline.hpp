#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "artemis/data/vitals.hpp"
#include "artemis/models/mlp.hpp"
#include "artemis/models/tree.hpp"

namespace artemis::pipeline {

namespace fs = std::filesystem;

// Declaration order is execution order.
enum class Stage { Preprocess, Rebalance, Synthesize, Analyze, Train, Evaluate, Compare, Simulate };

std::string_view stage_name(Stage stage) noexcept;
Stage stage_from_name(std::string_view name);

enum class ModelKind { Mlp, Tree, Ensemble };

std::string_view kind_name(ModelKind kind) noexcept;
ModelKind kind_from_name(std::string_view name);

struct SynthesizeParams {
  std::size_t count = 60'000;
  std::optional<fs::path> rules;  // default rule table when empty
};

struct AnalyzeParams {
  data::Feature bin_feature = data::Feature::Temperature;
  double bin_width = 1.0;
};

struct TrainParams {
  std::vector<ModelKind> kinds = {ModelKind::Mlp, ModelKind::Tree};
  double split_ratio = 0.8;
  std::vector<data::Feature> features = data::kClassifierFeatures;
  std::vector<std::size_t> hidden{models::kDefaultHiddenWidths.begin(),
                                  models::kDefaultHiddenWidths.end()};
  models::TrainConfig mlp;  // seed is ignored; derived from the run seed
  models::TreeConfig tree;
};

struct CompareParams {
  ModelKind model_a = ModelKind::Mlp;
  ModelKind model_b = ModelKind::Tree;
  std::size_t n_subsets = 50;
  double subset_fraction = 0.2;
};

struct SimulateParams {
  std::optional<fs::path> scenario;
  ModelKind model = ModelKind::Mlp;
  double step_dt = 1.0;
  std::size_t max_steps = 100'000;
  std::optional<std::string> server_url;  // in-process collection when empty
};

struct RunManifest {
  std::uint64_t seed = 42;
  std::optional<fs::path> input;
  fs::path output_dir = "artemis-out";
  std::vector<Stage> stages;
  SynthesizeParams synthesize;
  AnalyzeParams analyze;
  TrainParams train;
  CompareParams compare;
  SimulateParams simulate;
};

// Relative paths are resolved against `base_dir`. Throws ConfigError.
RunManifest manifest_from_json(const nlohmann::json& j, const fs::path& base_dir = {});
RunManifest load_manifest(const fs::path& path);
nlohmann::json to_json(const RunManifest& manifest);

struct ArtifactRecord {
  Stage stage = Stage::Preprocess;
  fs::path path;
  std::string sha256;
  bool partial = false;
};

struct RunResult {
  int exit_code = 0;
  std::optional<Stage> failed_stage;
  std::string error;
  std::vector<ArtifactRecord> artifacts;
  fs::path manifest_path;  // <output_dir>/run_manifest.json
};

// Exit status for an exception escaping a stage or a subcommand:
// 1 usage/config, 2 data, 3 anything else.
int exit_code_for(std::exception_ptr error) noexcept;

// Paths a stage wrote, in write order.
using Outputs = std::vector<fs::path>;

// Stage bodies. Each reads only its explicit inputs and appends every file it
// writes to `out` before returning.
void preprocess_stage(const fs::path& input, const fs::path& out_dir, Outputs& out);
void rebalance_stage(const fs::path& input, std::uint64_t seed, const fs::path& out_dir,
                     Outputs& out);
void synthesize_stage(const SynthesizeParams& params, std::uint64_t seed,
                      const fs::path& out_dir, Outputs& out);
void analyze_stage(const fs::path& input, const AnalyzeParams& params, const fs::path& out_dir,
                   Outputs& out);
// train.csv and test.csv.
void split_stage(const fs::path& input, double ratio, std::uint64_t seed,
                 const fs::path& out_dir, Outputs& out);
// model_<kind>.json, plus history_<kind>.json for the network.
void train_stage(const fs::path& train_csv, ModelKind kind, const TrainParams& params,
                 std::uint64_t seed, const fs::path& out_dir, Outputs& out);
// metrics_<tag>.json, metrics_<tag>.txt, roc_<tag>.csv.
void evaluate_stage(const fs::path& model_path, const fs::path& test_csv, std::string_view tag,
                    const fs::path& out_dir, Outputs& out);
// comparison.json, comparison.txt.
void compare_stage(const fs::path& model_a, const fs::path& model_b, const fs::path& test_csv,
                   const CompareParams& params, std::uint64_t seed, const fs::path& out_dir,
                   Outputs& out);
// mission_log.jsonl. `seed` overrides the scenario's own seed when given.
void simulate_stage(const fs::path& scenario, const fs::path& model_path,
                    const SimulateParams& params, std::optional<std::uint64_t> seed,
                    const fs::path& out_dir, Outputs& out);

// Runs the requested stages in declaration order. On failure the failing
// stage's files are renamed with a ".partial" suffix. run_manifest.json is
// always written and lists every artifact with its SHA-256.
RunResult run_pipeline(const RunManifest& manifest);

}  // namespace artemis::pipeline
