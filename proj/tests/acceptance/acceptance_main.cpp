// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <thread>

#include <httplib.h>

#include "artemis/data/preprocess.hpp"
#include "artemis/error.hpp"
#include "artemis/eval/metrics.hpp"
#include "artemis/eval/roc.hpp"
#include "artemis/eval/wilcoxon.hpp"
#include "artemis/models/classify.hpp"
#include "artemis/models/serialize.hpp"
#include "artemis/pipeline/pipeline.hpp"
#include "artemis/server/http.hpp"
#include "artemis/sim/mission.hpp"

namespace fs = std::filesystem;
using namespace artemis;
using data::Acuity;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

// Shared output of the headline run, reused by later criteria.
struct Workspace {
  fs::path root;
  fs::path headline;
  double headline_seconds = 0;
  bool headline_ok = false;
};

Outcome headline(Workspace& ws) {
  const auto manifest = pipeline::manifest_from_json(
      {{"seed", 42},
       {"output_dir", ws.headline.string()},
       {"stages", {"synthesize", "train", "evaluate", "compare"}},
       {"synthesize", {{"count", 60000}}},
       {"train", {{"kinds", {"mlp", "tree"}}, {"split_ratio", 0.8}}},
       {"compare", {{"model_a", "mlp"}, {"model_b", "tree"}, {"n_subsets", 50}}}});
  const auto t0 = Clock::now();
  const auto run = pipeline::run_pipeline(manifest);
  ws.headline_seconds = seconds_since(t0);
  if (run.exit_code != 0) return {false, "pipeline failed: " + run.error};
  ws.headline_ok = true;
  const double net = read_json(ws.headline / "metrics_mlp.json")["accuracy"];
  const double tree = read_json(ws.headline / "metrics_tree.json")["accuracy"];
  const bool pass = net >= 0.90 && tree >= 0.88 && net > tree && ws.headline_seconds < 600;
  return {pass, fmt("network %.4f (>= 0.90), tree %.4f (>= 0.88), %.0f s (< 600)", net, tree,
                    ws.headline_seconds)};
}

Outcome reference_counts() {
  struct Row {
    std::size_t tp, tn, fp, fn;
    double precision, recall;
  };
  const Row rows[5] = {{496, 56584, 10, 1146, 0.98, 0.30},
                       {623, 56259, 107, 1247, 0.85, 0.33},
                       {2987, 53758, 354, 1137, 0.89, 0.72},
                       {42292, 12122, 3596, 226, 0.92, 0.99},
                       {7081, 49464, 690, 1001, 0.91, 0.87}};
  bool pass = true;
  std::string detail;
  for (std::size_t k = 0; k < 5; ++k) {
    const auto& r = rows[k];
    const auto m = eval::metrics_from_counts(data::acuity_at(k), r.tp, r.tn, r.fp, r.fn);
    const bool ok_p = std::abs(m.precision - r.precision) <= 0.005;
    const bool ok_r = std::abs(m.recall - r.recall) <= 0.005;
    if (!ok_p || !ok_r) {
      pass = false;
      detail += fmt("class %zu precision %.4f vs %.2f, recall %.4f vs %.2f; ", k + 1, m.precision,
                    r.precision, m.recall, r.recall);
    }
  }
  return {pass, pass ? "all 10 cells within 0.005" : detail};
}

Outcome preprocess_arithmetic() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> small(0, 30);
  std::uniform_real_distribution<double> u(0, 1);
  for (int corpus = 0; corpus < 1000; ++corpus) {
    std::vector<data::TriageRecord> rows;
    const int base = 1 + small(rng), dups = small(rng), missing = small(rng), outliers = small(rng);
    for (int i = 0; i < base; ++i) {
      data::TriageRecord r;
      r.vitals = {97.0 + u(rng), 60.0 + i, 16, 95.0 + 4 * u(rng), 120, 80, {}};
      r.acuity = data::acuity_at(static_cast<std::size_t>(i % 5));
      rows.push_back(r);
    }
    for (int i = 0; i < dups; ++i) rows.push_back(rows[static_cast<std::size_t>(i % base)]);
    for (int i = 0; i < missing; ++i) {
      auto r = rows[static_cast<std::size_t>(i % base)];
      r.vitals.heart_rate = 300.0 + i;  // unique, so never a duplicate
      if (i % 2) r.acuity.reset(); else r.vitals.o2_sat = data::kMissing;
      rows.push_back(r);
    }
    for (int i = 0; i < outliers; ++i) {
      auto r = rows[static_cast<std::size_t>(i % base)];
      r.vitals.heart_rate = 221.0 + i;
      rows.push_back(r);
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto rep = data::preprocess(rows).report;
    const data::PreprocessReport expected{rows.size(), static_cast<std::size_t>(dups),
                                          static_cast<std::size_t>(missing),
                                          static_cast<std::size_t>(outliers),
                                          static_cast<std::size_t>(base)};
    if (!(rep == expected) || !rep.consistent()) {
      return {false, fmt("corpus %d: got %zu kept, expected %d", corpus, rep.output_count, base)};
    }
  }
  const data::PreprocessReport chain{425087, 18991, 13248, 392848 - 385818, 385818};
  const bool chain_ok = chain.consistent() && 425087 - 18991 - 13248 == 392848;
  return {chain_ok, fmt("1000 corpora exact; 425087 - 18991 - 13248 = 392848, minus %d outliers = 385818",
                        392848 - 385818)};
}

Outcome gradient_check() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> width(1, 8), hidden(0, 3), n_rows(1, 10);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<std::size_t> cls(0, 4);
  double worst = 0;
  for (int net = 0; net < 100; ++net) {
    const std::size_t input = width(rng);
    std::vector<std::size_t> widths(hidden(rng));
    for (auto& w : widths) w = width(rng);
    auto model = models::make_mlp(input, widths, rng());
    // Random biases keep every ReLU input off the kink, where the derivative is undefined.
    for (auto& layer : model.layers) {
      for (auto& b : layer.bias) b = 0.5 * g(rng);
    }
    Matrix x(n_rows(rng), input);
    for (auto& v : x.values()) v = g(rng);
    std::vector<Acuity> y;
    for (std::size_t i = 0; i < x.rows(); ++i) y.push_back(data::acuity_at(cls(rng)));

    const auto grads = models::mlp_loss_and_grad(model, x, y).gradients;
    const double h = 1e-5;
    auto check = [&](double& p, double analytic) {
      const double saved = p;
      p = saved + h;
      const double up = models::mlp_loss(model, x, y);
      p = saved - h;
      const double down = models::mlp_loss(model, x, y);
      p = saved;
      const double numeric = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(numeric - analytic) /
                                  std::max({std::abs(numeric), std::abs(analytic), 1e-6}));
    };
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      auto& w = model.layers[l].weights.values();
      for (std::size_t i = 0; i < w.size(); ++i) check(w[i], grads[l].weights.values()[i]);
      for (std::size_t i = 0; i < model.layers[l].bias.size(); ++i) {
        check(model.layers[l].bias[i], grads[l].bias[i]);
      }
    }
  }
  const double t = seconds_since(t0);
  return {worst < 1e-4 && t < 30, fmt("worst relative error %.2e (< 1e-4), %.2f s (< 30)", worst, t)};
}

Outcome auc_oracle() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> size(2, 100);
  std::uniform_int_distribution<int> grid(0, 25), cls(1, 5);
  double worst = 0;
  for (int set = 0; set < 200; ++set) {
    const std::size_t n = size(rng);
    std::vector<double> s;
    std::vector<Acuity> t;
    for (std::size_t i = 0; i < n; ++i) {
      s.push_back(set % 2 ? grid(rng) / 25.0 : std::generate_canonical<double, 53>(rng));
      t.push_back(data::acuity_from_level(cls(rng)));
    }
    t[0] = Acuity::Moderate;
    t[1] = Acuity::Delay;
    const auto curve = eval::roc_auc(s, t, Acuity::Moderate);
    double wins = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (t[i] != Acuity::Moderate) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (t[j] == Acuity::Moderate) continue;
        pairs += 1;
        wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
    }
    worst = std::max(worst, std::abs(curve.auc - wins / pairs));
  }
  return {worst < 1e-12, fmt("max |trapezoid - pairwise| = %.3e over 200 sets", worst)};
}

Outcome wilcoxon() {
  const std::vector<double> a = {2, 3, 4, 5, 6}, b = {1, 1, 1, 1, 1};
  const auto five = eval::wilcoxon_one_tailed(a, b);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.2, 1.0);
  double worst = 0;
  for (int sample = 0; sample < 100; ++sample) {
    const std::size_t n = 20 + static_cast<std::size_t>(sample % 6);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = g(rng);
      y[i] = g(rng) - 0.2;
    }
    const auto r = eval::signed_ranks(x, y);
    const double w = r.negative_rank_sum();
    worst = std::max(worst, std::abs(eval::wilcoxon_exact_p(r, w) - eval::wilcoxon_normal_p(r, w)));
  }
  return {five.p == 0.03125 && worst < 0.01,
          fmt("n=5 p = %.5f; max |exact - normal| = %.4f for 20 <= n <= 25", five.p, worst)};
}

Outcome comparison(const Workspace& ws) {
  if (!ws.headline_ok) return {false, "headline run unavailable"};
  const auto full = read_json(ws.headline / "comparison.json");
  const bool finite = full["p_value"].is_number() && std::isfinite(full["p_value"].get<double>());

  const fs::path dir = ws.root / "stump";
  fs::create_directories(dir);
  pipeline::Outputs out;
  pipeline::TrainParams params;
  params.tree.max_depth = 1;
  pipeline::train_stage(ws.headline / "train.csv", pipeline::ModelKind::Tree, params, 42, dir, out);
  pipeline::compare_stage(ws.headline / "model_mlp.json", dir / "model_tree.json",
                          ws.headline / "test.csv", {}, 42, dir, out);
  const auto stump = read_json(dir / "comparison.json");
  const double p = stump["p_value"].is_number() ? stump["p_value"].get<double>() : 1.0;
  const std::size_t wins = stump["wins_a"];
  return {finite && p < 0.001 && wins >= 45,
          fmt("full tree p = %s; depth-1 tree p = %.3e (< 0.001), wins %zu/50 (>= 45)",
              full["p_value"].dump().c_str(), p, wins)};
}

Outcome mission(const Workspace& ws) {
  if (!ws.headline_ok) return {false, "headline run unavailable"};
  const auto model = models::load_model(ws.headline / "model_mlp.json");
  const sim::VitalsClassifier classify = [&](const data::VitalSigns& v) {
    return models::classify_vitals(model, v);
  };
  const auto scenario = std::make_shared<const sim::Scenario>(
      sim::load_scenario(fs::path(ARTEMIS_DATA_DIR) / "scenarios" / "demo_12x3.json"));
  const auto t0 = Clock::now();
  sim::CollectingSink first, second;
  const auto log_a = sim::run_mission(scenario, classify, first);
  const auto log_b = sim::run_mission(scenario, classify, second);
  const double t = seconds_since(t0) / 2;
  std::set<std::string> victims;
  for (const auto& r : first.reports()) victims.insert(r.victim_id);
  const bool identical = sim::mission_log_jsonl(log_a) == sim::mission_log_jsonl(log_b);
  return {first.reports().size() == 12 && victims.size() == 12 && identical && t < 10,
          fmt("%zu reports, %zu distinct victims, logs %s, %.3f s per run", first.reports().size(),
              victims.size(), identical ? "identical" : "differ", t)};
}

sim::VictimReport report_for(int i) {
  sim::VictimReport r;
  r.victim_id = fmt("V%03d", i % 60);
  r.robot_id = fmt("R%d", i % 4);
  r.report_id = r.robot_id + ":" + r.victim_id + fmt("#%d", i);
  r.geotag = {40.0 + i * 1e-6, -83.0 + i * 1e-6};
  r.vitals = {98.6, 70.0 + i % 50, 16, 97, 120, 80, {}};
  r.acuity = data::acuity_at(static_cast<std::size_t>(i % 5));
  r.probabilities[data::class_index(r.acuity)] = 1.0;
  r.timestamp_ms = 1'700'000'000'000 + i * 1000;
  return r;
}

json listing(const server::Registry& reg) {
  json out = json::array();
  for (const auto& e : reg.list_victims()) out.push_back(server::to_json(e));
  return out;
}

Outcome durability(const Workspace& ws) {
  const fs::path log = ws.root / "events.jsonl";
  const fs::path snapshot = ws.root / "before.json";
  // The writer process dies without running destructors.
  const pid_t child = fork();
  if (child == 0) {
    try {
      server::Registry reg(log);
      for (int i = 0; i < 100; ++i) reg.submit_report(report_for(i));
      for (int v = 0; v < 50; ++v) {
        const std::string id = fmt("V%03d", v % 40);
        reg.update_status(id, v < 40 ? server::VictimStatus::Acknowledged : server::VictimStatus::Treated,
                          "medic");
      }
      std::ofstream(snapshot) << listing(reg).dump();
    } catch (...) {
      _exit(1);
    }
    _exit(0);
  }
  int status = 0;
  waitpid(child, &status, 0);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "writer process failed"};

  const json before = read_json(snapshot);
  server::Registry recovered(log);
  const bool same = listing(recovered) == before && recovered.last_event_id() == 150;

  const fs::path torn = ws.root / "torn.jsonl";
  fs::copy_file(log, torn);
  std::ofstream(torn, std::ios::app) << R"({"id":151,"kind":"StatusCh)";
  const auto rec = server::recover(torn);
  const bool torn_ok = rec.state.events.size() == 150 && rec.warnings.size() == 1;
  return {same && torn_ok,
          fmt("%zu victims identical after kill: %s; torn tail kept %zu/150 events", before.size(),
              same ? "yes" : "no", rec.state.events.size())};
}

Outcome latency() {
  server::ServerConfig cfg;
  cfg.port = 0;
  server::CommandServer srv(cfg);
  const int port = srv.start();
  constexpr int kTrials = 5;
  std::atomic<int> seen{0};
  std::vector<Clock::time_point> arrived(kTrials);
  std::thread subscriber([&] {
    httplib::Client cli("127.0.0.1", port);
    cli.set_read_timeout(10, 0);
    std::string buf;
    cli.Get("/api/events", [&](const char* d, std::size_t n) {
      buf.append(d, n);
      for (auto pos = buf.find("event: ReportAdded"); pos != std::string::npos;
           pos = buf.find("event: ReportAdded")) {
        arrived[static_cast<std::size_t>(seen.load())] = Clock::now();
        ++seen;
        buf.erase(0, pos + 1);
      }
      return seen < kTrials;
    });
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  httplib::Client poster("127.0.0.1", port);
  double worst = 0;
  for (int i = 0; i < kTrials; ++i) {
    const auto t0 = Clock::now();
    const auto res = poster.Post("/api/reports", sim::to_json(report_for(i)).dump(), "application/json");
    if (!res || res->status != 200) break;
    while (seen <= i && seconds_since(t0) < 2.0) std::this_thread::sleep_for(std::chrono::microseconds(200));
    worst = std::max(worst, seen > i ? std::chrono::duration<double>(arrived[static_cast<std::size_t>(i)] - t0).count() : 99.0);
  }
  subscriber.join();
  srv.stop();
  return {seen == kTrials && worst < 1.0,
          fmt("%d/%d events observed, worst POST-to-event %.1f ms (< 1000)", seen.load(), kTrials, worst * 1e3)};
}

}  // namespace

int main() {
  Workspace ws;
  ws.root = fs::temp_directory_path() / fmt("artemis-acceptance-%d", static_cast<int>(getpid()));
  ws.headline = ws.root / "headline";
  fs::create_directories(ws.headline);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"headline accuracy", [&] { return headline(ws); }},
      {"reference metric arithmetic", reference_counts},
      {"preprocessing arithmetic", preprocess_arithmetic},
      {"gradient correctness", gradient_check},
      {"AUC oracle equivalence", auc_oracle},
      {"Wilcoxon exactness", wilcoxon},
      {"model comparison direction", [&] { return comparison(ws); }},
      {"mission completeness", [&] { return mission(ws); }},
      {"server durability", [&] { return durability(ws); }},
      {"end-to-end latency", latency},
  };

  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::error_code ec;
  fs::remove_all(ws.root, ec);
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
