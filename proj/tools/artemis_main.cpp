#include <csignal>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "artemis/data/vitals.hpp"
#include "artemis/error.hpp"
#include "artemis/pipeline/pipeline.hpp"
#include "artemis/server/http.hpp"

namespace fs = std::filesystem;
namespace pl = artemis::pipeline;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Run seed (default 42, or the manifest's)");
  sub->add_option("--config", c.config, "Manifest supplying defaults; flags override")
      ->check(CLI::ExistingFile);
}

pl::RunManifest base_manifest(const Common& c) {
  pl::RunManifest m = c.config ? pl::load_manifest(*c.config) : pl::RunManifest{};
  if (c.seed) m.seed = *c.seed;
  return m;
}

fs::path output_dir(const std::optional<std::string>& flag, const pl::RunManifest& m) {
  const fs::path dir = flag ? fs::path(*flag) : m.output_dir;
  fs::create_directories(dir);
  return dir;
}

fs::path need_path(const std::optional<std::string>& flag, const std::optional<fs::path>& fallback,
                   std::string_view what) {
  if (flag) return *flag;
  if (fallback) return *fallback;
  throw artemis::ConfigError(std::string(what) + " is required");
}

void report(const pl::Outputs& out) {
  for (const auto& p : out) std::cout << "wrote " << p.string() << '\n';
}

void print_file(const fs::path& p) {
  std::ifstream in(p);
  std::cout << in.rdbuf();
}

std::pair<std::string, int> parse_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw artemis::ConfigError("--listen expects host:port");
  int port = 0;
  try {
    port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
    throw artemis::ConfigError("--listen port '" + listen.substr(colon + 1) + "' is not a number");
  }
  if (port < 0 || port > 65535) throw artemis::ConfigError("--listen port out of range");
  return {listen.substr(0, colon), port};
}

int serve(const std::string& listen, const std::optional<std::string>& log,
          const std::optional<std::string>& static_dir) {
  artemis::server::ServerConfig config;
  std::tie(config.host, config.port) = parse_listen(listen);
  if (log) config.log_path = *log;
  if (static_dir) config.static_dir = *static_dir;

  // Signals are taken synchronously so shutdown runs outside a handler.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  artemis::server::CommandServer server(config);
  for (const auto& w : server.registry().recovery_warnings()) std::cerr << "warning: " << w << '\n';
  server.start();
  std::cout << "listening on " << server.base_url() << std::endl;
  int sig = 0;
  sigwait(&stop_signals, &sig);
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ARTEMIS triage pipeline, field simulator and command server"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "artemis 0.1.0");

  struct {
    Common common;
    std::optional<std::string> input, output, model, model_b, scenario, server_url, rules, kind, tag;
    std::optional<std::string> bin_feature;
    std::optional<double> bin_width, split_ratio, learning_rate, fraction, step_dt;
    std::optional<std::size_t> count, epochs, batch_size, max_depth, subsets, max_steps;
    std::vector<std::string> features;
    bool rebalance = false;
    bool no_split = false;
    std::string listen = "127.0.0.1:8080";
    std::optional<std::string> log, static_dir;
  } o;

  auto* pre = app.add_subcommand("preprocess", "Remove duplicates, missing values and outliers");
  add_common(pre, o.common);
  pre->add_option("--input", o.input, "Raw triage CSV");
  pre->add_option("--output", o.output, "Output directory");
  pre->add_flag("--rebalance", o.rebalance, "Also down-sample classes to the smallest one");

  auto* ana = app.add_subcommand("analyze", "Correlation matrix and per-class binning");
  add_common(ana, o.common);
  ana->add_option("--input", o.input, "Triage CSV");
  ana->add_option("--output", o.output, "Output directory");
  ana->add_option("--bin-feature", o.bin_feature, "Feature to bin");
  ana->add_option("--bin-width", o.bin_width, "Bin width")->check(CLI::PositiveNumber);

  auto* syn = app.add_subcommand("synthesize", "Generate rule-labelled synthetic records");
  add_common(syn, o.common);
  syn->add_option("--output", o.output, "Output directory");
  syn->add_option("--count", o.count, "Number of records")->check(CLI::PositiveNumber);
  syn->add_option("--rules", o.rules, "Rule table JSON")->check(CLI::ExistingFile);

  auto* trn = app.add_subcommand("train", "Split a dataset and fit a model");
  add_common(trn, o.common);
  trn->add_option("--input", o.input, "Dataset CSV");
  trn->add_option("--output", o.output, "Output directory");
  trn->add_option("--kind", o.kind, "mlp, tree or ensemble")
      ->check(CLI::IsMember({"mlp", "tree", "ensemble"}));
  trn->add_option("--split-ratio", o.split_ratio, "Train fraction");
  trn->add_flag("--no-split", o.no_split, "Train on the whole input");
  trn->add_option("--features", o.features, "Classifier features (mlp and tree)");
  trn->add_option("--epochs", o.epochs);
  trn->add_option("--batch-size", o.batch_size);
  trn->add_option("--learning-rate", o.learning_rate);
  trn->add_option("--max-depth", o.max_depth, "Tree depth limit");

  auto* evl = app.add_subcommand("evaluate", "Per-class metrics and one-vs-all ROC");
  add_common(evl, o.common);
  evl->add_option("--model", o.model, "Model JSON");
  evl->add_option("--input", o.input, "Labelled test CSV");
  evl->add_option("--output", o.output, "Output directory");
  evl->add_option("--tag", o.tag, "Artifact name suffix (default: model file stem without \"model_\")");

  auto* cmp = app.add_subcommand("compare", "Paired subset comparison with a Wilcoxon test");
  add_common(cmp, o.common);
  cmp->add_option("--model", o.model, "Model A JSON");
  cmp->add_option("--model-b", o.model_b, "Model B JSON");
  cmp->add_option("--input", o.input, "Labelled test CSV");
  cmp->add_option("--output", o.output, "Output directory");
  cmp->add_option("--subsets", o.subsets)->check(CLI::PositiveNumber);
  cmp->add_option("--fraction", o.fraction);

  auto* sim = app.add_subcommand("simulate", "Run a field mission");
  add_common(sim, o.common);
  sim->add_option("--scenario", o.scenario, "Scenario JSON");
  sim->add_option("--model", o.model, "Model JSON used on board");
  sim->add_option("--output", o.output, "Output directory");
  sim->add_option("--server-url", o.server_url, "Command server base URL");
  sim->add_option("--step-dt", o.step_dt)->check(CLI::PositiveNumber);
  sim->add_option("--max-steps", o.max_steps);

  auto* srv = app.add_subcommand("serve", "Run the command server in the foreground");
  srv->add_option("--listen", o.listen, "host:port")->envname("ARTEMIS_LISTEN")->capture_default_str();
  srv->add_option("--log", o.log, "Event log path")->envname("ARTEMIS_LOG");
  srv->add_option("--static", o.static_dir, "Dashboard bundle directory")
      ->envname("ARTEMIS_STATIC")
      ->check(CLI::ExistingDirectory);

  auto* run = app.add_subcommand("run", "Execute a manifest");
  add_common(run, o.common);
  run->add_option("--input", o.input, "Override the manifest input");
  run->add_option("--output", o.output, "Override the manifest output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (srv->parsed()) return serve(o.listen, o.log, o.static_dir);

    if (run->parsed()) {
      if (!o.common.config) throw artemis::ConfigError("run needs --config");
      auto m = base_manifest(o.common);
      if (o.input) m.input = *o.input;
      if (o.output) m.output_dir = *o.output;
      const auto result = pl::run_pipeline(m);
      for (const auto& a : result.artifacts) {
        std::cout << a.sha256.substr(0, 12) << "  " << a.path.string() << (a.partial ? "  (partial)" : "")
                  << '\n';
      }
      if (result.failed_stage) {
        std::cerr << "artemis: stage " << pl::stage_name(*result.failed_stage)
                  << " failed: " << result.error << '\n';
      }
      std::cout << "manifest " << result.manifest_path.string() << '\n';
      return result.exit_code;
    }

    auto m = base_manifest(o.common);
    const fs::path dir = output_dir(o.output, m);
    pl::Outputs out;

    if (pre->parsed()) {
      const fs::path input = need_path(o.input, m.input, "--input");
      // Outputs are recorded as they are written, so report them even on failure.
      try {
        pl::preprocess_stage(input, dir, out);
        if (o.rebalance) pl::rebalance_stage(dir / "clean.csv", m.seed, dir, out);
      } catch (...) {
        report(out);
        throw;
      }
      report(out);
      print_file(dir / "preprocess_report.json");
    } else if (ana->parsed()) {
      if (o.bin_feature) {
        const auto f = artemis::data::feature_from_name(*o.bin_feature);
        if (!f) throw artemis::ConfigError("unknown feature '" + *o.bin_feature + "'");
        m.analyze.bin_feature = *f;
      }
      if (o.bin_width) m.analyze.bin_width = *o.bin_width;
      pl::analyze_stage(need_path(o.input, m.input, "--input"), m.analyze, dir, out);
      report(out);
    } else if (syn->parsed()) {
      if (o.count) m.synthesize.count = *o.count;
      if (o.rules) m.synthesize.rules = *o.rules;
      pl::synthesize_stage(m.synthesize, m.seed, dir, out);
      report(out);
    } else if (trn->parsed()) {
      const auto kind = pl::kind_from_name(o.kind ? *o.kind
                                                  : std::string(pl::kind_name(m.train.kinds.front())));
      if (o.split_ratio) m.train.split_ratio = *o.split_ratio;
      if (!o.features.empty()) m.train.features = artemis::data::parse_feature_list(o.features);
      if (o.epochs) m.train.mlp.epochs = *o.epochs;
      if (o.batch_size) m.train.mlp.batch_size = *o.batch_size;
      if (o.learning_rate) m.train.mlp.learning_rate = *o.learning_rate;
      if (o.max_depth) m.train.tree.max_depth = *o.max_depth;
      m.train.mlp.validate();
      const fs::path input = need_path(o.input, m.input, "--input");
      fs::path train_csv = input;
      if (!o.no_split) {
        pl::split_stage(input, m.train.split_ratio, m.seed, dir, out);
        train_csv = dir / "train.csv";
      }
      pl::train_stage(train_csv, kind, m.train, m.seed, dir, out);
      report(out);
    } else if (evl->parsed()) {
      const fs::path model = need_path(o.model, std::nullopt, "--model");
      const fs::path input = need_path(o.input, std::nullopt, "--input");
      std::string tag = o.tag ? *o.tag : model.stem().string();
      if (!o.tag && tag.starts_with("model_")) tag.erase(0, 6);
      pl::evaluate_stage(model, input, tag, dir, out);
      report(out);
      print_file(dir / ("metrics_" + tag + ".txt"));
    } else if (cmp->parsed()) {
      if (o.subsets) m.compare.n_subsets = *o.subsets;
      if (o.fraction) m.compare.subset_fraction = *o.fraction;
      pl::compare_stage(need_path(o.model, std::nullopt, "--model"),
                        need_path(o.model_b, std::nullopt, "--model-b"),
                        need_path(o.input, std::nullopt, "--input"), m.compare, m.seed, dir, out);
      report(out);
      print_file(dir / "comparison.txt");
    } else if (sim->parsed()) {
      if (o.step_dt) m.simulate.step_dt = *o.step_dt;
      if (o.max_steps) m.simulate.max_steps = *o.max_steps;
      if (o.server_url) m.simulate.server_url = *o.server_url;
      const fs::path scenario = need_path(o.scenario, m.simulate.scenario, "--scenario");
      try {
        pl::simulate_stage(scenario, need_path(o.model, std::nullopt, "--model"),
                           m.simulate, o.common.seed, dir, out);
      } catch (...) {
        report(out);
        throw;
      }
      report(out);
    }
    return 0;
  } catch (...) {
    const auto e = std::current_exception();
    try {
      std::rethrow_exception(e);
    } catch (const std::exception& ex) {
      std::cerr << "artemis: " << ex.what() << '\n';
    }
    return pl::exit_code_for(e);
  }
}
