#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "artemis/data/normalize.hpp"
#include "artemis/data/rules.hpp"
#include "artemis/data/synth.hpp"
#include "artemis/error.hpp"
#include "artemis/models/classify.hpp"
#include "artemis/models/ensemble.hpp"
#include "artemis/models/mlp.hpp"
#include "artemis/models/serialize.hpp"
#include "artemis/models/tree.hpp"
#include "fixtures.hpp"

using namespace artemis;
using namespace artemis::models;
using data::Acuity;
using doctest::Approx;

namespace {

Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> c(0, 4);
  Dataset ds;
  ds.features = Matrix(n, d);
  for (auto& x : ds.features.values()) x = g(rng);
  for (std::size_t i = 0; i < n; ++i) ds.labels.push_back(data::acuity_at(static_cast<std::size_t>(c(rng))));
  return ds;
}

double sum(const Probabilities& p) { return std::accumulate(p.begin(), p.end(), 0.0); }

// Central differences over every parameter; returns the worst relative error.
// Biases are randomized first so no ReLU input sits exactly on the kink; the
// 1e-6 floor keeps roundoff on vanishing gradients from reading as error.
double worst_gradient_error(MlpModel model, const Dataset& ds) {
  std::mt19937_64 rng(model.layers.size() * 7919 + ds.size());
  std::normal_distribution<double> g(0.0, 0.5);
  for (auto& layer : model.layers) {
    for (auto& b : layer.bias) b = g(rng);
  }
  const auto analytic = mlp_loss_and_grad(model, ds.features, ds.labels).gradients;
  const double h = 1e-5;
  double worst = 0.0;
  auto check = [&](double& param, double grad) {
    const double saved = param;
    param = saved + h;
    const double up = mlp_loss(model, ds.features, ds.labels);
    param = saved - h;
    const double down = mlp_loss(model, ds.features, ds.labels);
    param = saved;
    const double numeric = (up - down) / (2 * h);
    const double denom = std::max({std::abs(numeric), std::abs(grad), 1e-6});
    worst = std::max(worst, std::abs(numeric - grad) / denom);
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto& w = model.layers[l].weights.values();
    for (std::size_t i = 0; i < w.size(); ++i) check(w[i], analytic[l].weights.values()[i]);
    auto& b = model.layers[l].bias;
    for (std::size_t i = 0; i < b.size(); ++i) check(b[i], analytic[l].bias[i]);
  }
  return worst;
}

}  // namespace

TEST_SUITE("mlp") {
  TEST_CASE("init shapes follow the widths") {
    const auto m = mlp_init(3, kDefaultHiddenWidths, 1);
    const std::vector<std::size_t> sizes = {3, 64, 64, 32, 32, 16, 16, 8, 5};
    CHECK(m.layer_sizes() == sizes);
    REQUIRE(m.layers.size() == 8);
    CHECK(m.layers.front().weights.rows() == 3);
    CHECK(m.layers.front().weights.cols() == 64);
    CHECK(m.layers.back().weights.rows() == 8);
    CHECK(m.layers.back().weights.cols() == 5);
  }

  TEST_CASE("init is seeded Glorot-uniform with zero biases") {
    const auto a = mlp_init(3, kDefaultHiddenWidths, 17);
    CHECK(a == mlp_init(3, kDefaultHiddenWidths, 17));
    CHECK_FALSE(a == mlp_init(3, kDefaultHiddenWidths, 18));
    for (const auto& layer : a.layers) {
      const double limit = std::sqrt(6.0 / static_cast<double>(layer.fan_in() + layer.fan_out()));
      for (double w : layer.weights.values()) CHECK(std::abs(w) <= limit);
      for (double b : layer.bias) CHECK(b == 0.0);
    }
  }

  TEST_CASE("the triage network needs seven hidden layers") {
    const std::array<std::size_t, 6> six = {64, 64, 32, 32, 16, 16};
    CHECK_THROWS_AS(mlp_init(3, six, 1), ConfigError);
  }

  TEST_CASE("all-zero parameters give uniform probabilities") {
    auto m = mlp_init(3, kDefaultHiddenWidths, 1);
    for (auto& l : m.layers) {
      std::fill(l.weights.values().begin(), l.weights.values().end(), 0.0);
    }
    const std::array<double, 3> x = {0.3, -1.0, 2.0};
    for (double p : mlp_forward(m, x).probabilities) CHECK(p == Approx(0.2));
  }

  TEST_CASE("hand-built one-unit network") {
    MlpModel m;
    DenseLayer hidden;
    hidden.weights = Matrix(2, 1, std::vector<double>{1.0, 2.0});
    hidden.bias = {0.5};
    DenseLayer out;
    out.weights = Matrix(1, 5, std::vector<double>{1.0, 0.0, -1.0, 2.0, 0.0});
    out.bias = {0, 0, 0, 0, 1};
    m.layers = {hidden, out};

    const std::array<double, 2> x = {1.0, 1.0};
    const double h = 3.5;  // relu(1 + 2 + 0.5)
    const std::array<double, 5> logits = {h, 0.0, -h, 2 * h, 1.0};
    double z = 0;
    for (double l : logits) z += std::exp(l);
    const auto label = mlp_forward(m, x);
    for (std::size_t k = 0; k < 5; ++k) CHECK(label.probabilities[k] == Approx(std::exp(logits[k]) / z));
    CHECK(label.acuity == Acuity::Delay);

    const std::array<double, 2> negative = {-3.0, -1.0};  // relu clips to 0
    const auto clipped = mlp_forward(m, negative);
    CHECK(clipped.acuity == Acuity::Minor);
  }

  TEST_CASE("softmax sums to one and ignores a constant shift") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0, 5);
    for (int i = 0; i < 100; ++i) {
      std::array<double, 5> l{}, shifted{};
      for (std::size_t k = 0; k < 5; ++k) {
        l[k] = g(rng);
        shifted[k] = l[k] + 123.4;
      }
      const auto p = softmax(l);
      const auto q = softmax(shifted);
      CHECK(sum(p) == Approx(1.0).epsilon(1e-12));
      for (std::size_t k = 0; k < 5; ++k) {
        CHECK(p[k] >= 0.0);
        CHECK(std::abs(p[k] - q[k]) < 1e-9);
      }
    }
  }

  TEST_CASE("argmax ties go to the more severe class") {
    CHECK(label_from_probabilities({0.1, 0.4, 0.1, 0.4, 0.0}).acuity == Acuity::Immediate);
  }

  TEST_CASE("random forward passes are valid distributions") {
    const auto m = mlp_init(3, kDefaultHiddenWidths, 4);
    const auto ds = random_dataset(50, 3, 4);
    for (std::size_t r = 0; r < 50; ++r) CHECK(sum(mlp_forward(m, ds.features.row(r)).probabilities) == Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("dimension mismatch throws") {
    const auto m = mlp_init(3, kDefaultHiddenWidths, 4);
    const std::array<double, 2> x = {0, 0};
    CHECK_THROWS_AS(mlp_forward(m, x), DimensionError);
  }

  TEST_CASE("uniform prediction loss is ln 5") {
    auto m = mlp_init(2, kDefaultHiddenWidths, 1);
    for (auto& l : m.layers) std::fill(l.weights.values().begin(), l.weights.values().end(), 0.0);
    const auto ds = random_dataset(17, 2, 1);
    CHECK(mlp_loss(m, ds.features, ds.labels) == Approx(std::log(5.0)).epsilon(1e-12));
  }

  TEST_CASE("duplicating a batch leaves the mean loss unchanged") {
    const auto m = mlp_init(3, kDefaultHiddenWidths, 8);
    const auto ds = random_dataset(10, 3, 8);
    std::vector<std::size_t> twice(20);
    for (std::size_t i = 0; i < 20; ++i) twice[i] = i % 10;
    const auto doubled = ds.subset(twice);
    CHECK(mlp_loss(m, doubled.features, doubled.labels) ==
          Approx(mlp_loss(m, ds.features, ds.labels)).epsilon(1e-12));
  }

  TEST_CASE("backprop matches central differences") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const std::vector<std::size_t> widths = {1 + seed % 8, 1 + (seed * 3) % 8};
      const auto m = make_mlp(3, widths, seed);
      CHECK(worst_gradient_error(m, random_dataset(6, 3, seed + 100)) < 1e-4);
    }
    CHECK(worst_gradient_error(mlp_init(3, kDefaultHiddenWidths, 5), random_dataset(8, 3, 5)) < 1e-4);
  }

  TEST_CASE("linearly separable toy reaches 99% within 50 epochs") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1, 1);
    Dataset ds;
    ds.features = Matrix(200, 2);
    for (std::size_t i = 0; i < 200; ++i) {
      double x = u(rng), y = u(rng);
      while (std::abs(x + y) < 0.1) {
        x = u(rng);
        y = u(rng);
      }
      ds.features(i, 0) = x;
      ds.features(i, 1) = y;
      ds.labels.push_back(x + y > 0 ? Acuity::Critical : Acuity::Minor);
    }
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.batch_size = 16;
    cfg.learning_rate = 0.01;
    cfg.seed = 3;
    const auto r = mlp_train(mlp_init(2, kDefaultHiddenWidths, 3), ds, cfg);
    CHECK(r.loss_history.size() == 50);
    CHECK(accuracy(mlp_predict(r.model, ds.features), ds.labels) >= 0.99);
  }

  TEST_CASE("training is deterministic and the loss trends down") {
    const auto rs = data::synthesize(3000, data::reference_class_mix(), data::default_synthesis_noise(),
                                     data::default_rule_table(), 6);
    const auto norm = data::fit_normalizer(rs, data::kClassifierFeatures);
    Dataset ds;
    ds.features = data::apply_normalizer(norm, rs);
    for (const auto& r : rs) ds.labels.push_back(*r.acuity);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.seed = 9;
    const auto a = mlp_train(mlp_init(3, kDefaultHiddenWidths, 2), ds, cfg);
    const auto b = mlp_train(mlp_init(3, kDefaultHiddenWidths, 2), ds, cfg);
    CHECK(a.model == b.model);
    CHECK(a.loss_history == b.loss_history);
    for (std::size_t e = 10; e < a.loss_history.size(); ++e) {
      CHECK(a.loss_history[e] <= a.loss_history[e - 10] * 1.01);
    }
  }

  TEST_CASE("invalid training configs are rejected") {
    TrainConfig cfg;
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    Dataset empty;
    CHECK_THROWS_AS(mlp_train(mlp_init(3, kDefaultHiddenWidths, 1), empty, TrainConfig{}), DataError);
  }
}

TEST_SUITE("tree") {
  Dataset labelled(std::vector<std::vector<double>> rows, std::vector<int> labels) {
    Dataset ds;
    ds.features = Matrix(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < rows[r].size(); ++c) ds.features(r, c) = rows[r][c];
      ds.labels.push_back(data::acuity_from_level(labels[r]));
    }
    return ds;
  }

  TEST_CASE("gini examples") {
    const std::vector<Acuity> same = {Acuity::Delay, Acuity::Delay};
    const std::vector<Acuity> half = {Acuity::Critical, Acuity::Critical, Acuity::Minor, Acuity::Minor};
    const std::vector<Acuity> mixed = {Acuity::Critical, Acuity::Critical, Acuity::Immediate, Acuity::Moderate};
    CHECK(gini_impurity(same) == 0.0);
    CHECK(gini_impurity(half) == Approx(0.5));
    CHECK(gini_impurity(mixed) == Approx(0.625));
    CHECK(gini_impurity(ClassCounts{1, 1, 1, 1, 1}) == Approx(0.8));
    CHECK_THROWS_AS(gini_impurity(std::vector<Acuity>{}), DataError);
  }

  TEST_CASE("majority ties go to the most severe class") {
    CHECK(majority_class({0, 3, 0, 3, 1}) == Acuity::Immediate);
  }

  TEST_CASE("single record is a single leaf") {
    const auto t = tree_fit(labelled({{1.0, 2.0}}, {3}));
    CHECK(t.nodes.size() == 1);
    const std::array<double, 2> x = {-100, 100};
    CHECK(tree_predict(t, x) == Acuity::Moderate);
  }

  TEST_CASE("1-D sign split is a depth-1 stump") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 1; i <= 10; ++i) {
      rows.push_back({-0.1 * i});
      labels.push_back(1);
      rows.push_back({0.1 * i});
      labels.push_back(5);
    }
    const auto ds = labelled(rows, labels);
    const auto t = tree_fit(ds);
    CHECK(t.depth() == 1);
    CHECK(t.nodes[0].threshold == Approx(0.0));
    CHECK(accuracy(tree_predict(t, ds.features), ds.labels) == 1.0);
  }

  TEST_CASE("value equal to the threshold goes right") {
    const auto t = tree_fit(labelled({{0.0}, {2.0}}, {1, 5}));
    REQUIRE(t.nodes[0].threshold == 1.0);
    const std::array<double, 1> at = {1.0};
    CHECK(tree_predict(t, at) == Acuity::Minor);
  }

  TEST_CASE("hand-built depth-3 tree agrees with a manual trace") {
    DecisionTree t;
    t.n_features = 2;
    auto internal = [](int f, double th, int l, int r) {
      TreeNode n;
      n.feature = f;
      n.threshold = th;
      n.left = l;
      n.right = r;
      return n;
    };
    auto leaf = [](Acuity a) {
      TreeNode n;
      n.prediction = a;
      return n;
    };
    t.nodes = {internal(0, 0.0, 1, 2),        internal(1, 0.0, 3, 4), internal(1, 1.0, 5, 6),
               leaf(Acuity::Critical),        internal(0, -1.0, 7, 8), leaf(Acuity::Moderate),
               leaf(Acuity::Delay),           leaf(Acuity::Immediate), leaf(Acuity::Minor)};
    auto trace = [](double x, double y) {
      if (x < 0) {
        if (y < 0) return Acuity::Critical;
        return x < -1 ? Acuity::Immediate : Acuity::Minor;
      }
      return y < 1 ? Acuity::Moderate : Acuity::Delay;
    };
    for (double x : {-2.0, -1.0, -0.5, 0.0, 0.5}) {
      for (double y : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
        const std::array<double, 2> v = {x, y};
        CHECK(tree_predict(t, v) == trace(x, y));
      }
    }
    CHECK(t.depth() == 3);
  }

  TEST_CASE("unbounded tree fits distinct vectors perfectly") {
    const auto ds = random_dataset(300, 3, 21);
    const auto t = tree_fit(ds);
    CHECK(accuracy(tree_predict(t, ds.features), ds.labels) == 1.0);
    for (const auto& n : t.nodes) {
      if (n.is_leaf()) CHECK(n.prediction == majority_class(n.counts));
    }
  }

  TEST_CASE("max depth and min samples bound the tree") {
    const auto ds = random_dataset(300, 3, 22);
    TreeConfig cfg;
    cfg.max_depth = 2;
    CHECK(tree_fit(ds, cfg).depth() <= 2);
    cfg.max_depth.reset();
    cfg.min_samples = 400;
    CHECK(tree_fit(ds, cfg).nodes.size() == 1);
  }

  TEST_CASE("leaf labels carry class frequencies") {
    const auto t = tree_fit(labelled({{0.0}, {0.0}, {0.0}, {1.0}}, {1, 1, 2, 5}));
    const std::array<double, 1> x = {0.0};
    const auto label = tree_label(t, x);
    CHECK(label.acuity == Acuity::Critical);
    CHECK(label.probabilities[0] == Approx(2.0 / 3.0));
    CHECK(label.probabilities[1] == Approx(1.0 / 3.0));
  }
}

TEST_SUITE("ensemble") {
  TEST_CASE("pair enumeration is lexicographic") {
    const std::vector<FeaturePair> expected = {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2},
                                               {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
    CHECK(feature_pairs(5) == expected);
  }

  TriageLabel vote(Acuity a, double p = 1.0) {
    TriageLabel l;
    l.acuity = a;
    l.probabilities[data::class_index(a)] = p;
    return l;
  }

  TEST_CASE("vote combination") {
    std::vector<TriageLabel> unanimous(10, vote(Acuity::Moderate));
    CHECK(combine_votes(unanimous) == Acuity::Moderate);

    std::vector<TriageLabel> tie;
    for (int i = 0; i < 5; ++i) tie.push_back(vote(Acuity::Moderate, 0.6));
    for (int i = 0; i < 5; ++i) tie.push_back(vote(Acuity::Delay, 0.6));
    CHECK(combine_votes(tie) == Acuity::Moderate);

    std::vector<TriageLabel> tally;
    for (int i = 0; i < 2; ++i) tally.push_back(vote(Acuity::Critical));
    for (int i = 0; i < 3; ++i) tally.push_back(vote(Acuity::Immediate));
    for (int i = 0; i < 5; ++i) tally.push_back(vote(Acuity::Delay));
    CHECK(combine_votes(tally) == Acuity::Delay);

    std::vector<TriageLabel> by_probability = {vote(Acuity::Minor, 0.9), vote(Acuity::Critical, 0.5)};
    CHECK(combine_votes(by_probability) == Acuity::Minor);
  }

  TEST_CASE("fit yields ten deterministic learners") {
    const auto ds = random_dataset(200, 5, 30);
    TrainConfig cfg;
    cfg.epochs = 3;
    const auto a = ensemble_fit(ds, cfg, 1);
    CHECK(a.learners.size() == 10);
    CHECK(a == ensemble_fit(ds, cfg, 1));
    for (std::size_t k = 0; k < 10; ++k) {
      CHECK(a.learners[k].features == feature_pairs(5)[k]);
      CHECK(a.learners[k].net.layer_sizes() == std::vector<std::size_t>{2, 16, 16, 5});
    }
    const auto label = ensemble_label(a, ds.features.row(0));
    CHECK(sum(label.probabilities) == Approx(1.0).epsilon(1e-9));
    CHECK(label.acuity == ensemble_predict(a, ds.features.row(0)));
  }

  TEST_CASE("wrong feature count is rejected") {
    CHECK_THROWS_AS(ensemble_fit(random_dataset(20, 4, 1), TrainConfig{}, 1), DimensionError);
  }
}

TEST_SUITE("inference and serialization") {
  struct Trained {
    MlpModel mlp;
    DecisionTree tree;
  };

  const Trained& trained() {
    static const Trained t = [] {
      const auto rs = data::synthesize(6000, data::reference_class_mix(), data::default_synthesis_noise(),
                                       data::default_rule_table(), 77);
      const auto norm = data::fit_normalizer(rs, data::kClassifierFeatures);
      Dataset ds;
      ds.features = data::apply_normalizer(norm, rs);
      for (const auto& r : rs) ds.labels.push_back(*r.acuity);
      TrainConfig cfg;
      cfg.epochs = 40;
      cfg.seed = 1;
      Trained out;
      out.mlp = mlp_train(mlp_init(3, kDefaultHiddenWidths, 1), ds, cfg).model;
      out.mlp.normalizer = norm;
      out.tree = tree_fit(ds);
      out.tree.normalizer = norm;
      return out;
    }();
    return t;
  }

  TEST_CASE("vitals at the training means forward the zero vector") {
    const auto& m = trained().mlp;
    auto v = artemis::testing::normal_vitals();
    v.temperature = m.normalizer.mean[0];
    v.heart_rate = m.normalizer.mean[1];
    v.o2_sat = m.normalizer.mean[2];
    const std::array<double, 3> zero = {0, 0, 0};
    CHECK(classify_vitals(m, v).probabilities == mlp_forward(m, zero).probabilities);
  }

  TEST_CASE("implausible vitals are a sensor fault") {
    auto v = artemis::testing::normal_vitals();
    v.o2_sat = 101;
    CHECK_THROWS_AS(classify_vitals(trained().mlp, v), OutOfRangeError);
    CHECK_THROWS_AS(classify_vitals(trained().tree, v), OutOfRangeError);
  }

  TEST_CASE("a model without a normalizer is a config error") {
    CHECK_THROWS_AS(classify_vitals(mlp_init(3, kDefaultHiddenWidths, 1), artemis::testing::normal_vitals()),
                    ConfigError);
  }

  TEST_CASE("crisis vitals from the acuity-1 region are predicted acuity 1") {
    const auto crisis = data::synthesize(200, {1.0, 0, 0, 0, 0}, data::default_synthesis_noise(),
                                         data::default_rule_table(), 12345);
    std::size_t hits = 0;
    for (const auto& r : crisis) hits += classify_vitals(trained().mlp, r.vitals).acuity == Acuity::Critical;
    CHECK(hits >= 180);
    const auto strong = artemis::testing::vitals(99.5, 160, 24, 75, 95, 60);
    CHECK(classify_vitals(trained().mlp, strong).acuity == Acuity::Critical);
  }

  TEST_CASE("models round-trip through JSON exactly") {
    const auto& t = trained();
    CHECK(mlp_from_json(to_json(t.mlp)) == t.mlp);
    CHECK(tree_from_json(to_json(t.tree)) == t.tree);
    CHECK(to_json(t.mlp)["format"] == "artemis-mlp/1");
    CHECK(to_json(t.tree)["format"] == "artemis-tree/1");

    TrainConfig cfg;
    cfg.epochs = 1;
    const auto e = ensemble_fit(random_dataset(50, 5, 3), cfg, 3);
    CHECK(ensemble_from_json(to_json(e)) == e);
    CHECK(std::holds_alternative<EnsembleModel>(model_from_json(to_json(e))));

    artemis::testing::TempDir dir;
    save_model(dir / "m.json", t.mlp);
    CHECK(std::get<MlpModel>(load_model(dir / "m.json")) == t.mlp);
  }

  TEST_CASE("malformed model files are data errors") {
    auto j = to_json(trained().mlp);
    j["format"] = "artemis-mlp/9";
    CHECK_THROWS_AS(mlp_from_json(j), DataError);
    j = to_json(trained().mlp);
    j["layers"][0]["bias"].erase(0);
    CHECK_THROWS_AS(mlp_from_json(j), DataError);
  }
}
