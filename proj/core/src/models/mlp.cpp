#include "artemis/models/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "artemis/error.hpp"
#include "artemis/random.hpp"

namespace artemis::models {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEpsilon = 1e-8;

void check_input(const MlpModel& model, std::size_t dims) {
  if (model.layers.empty()) throw DimensionError("model has no layers");
  if (dims != model.input_dim()) {
    throw DimensionError("expected " + std::to_string(model.input_dim()) + " features, got " +
                         std::to_string(dims));
  }
}

// out = in * W + b, row-wise over the batch.
void dense_forward(const Matrix& in, const DenseLayer& layer, Matrix& out) {
  const std::size_t batch = in.rows();
  const std::size_t fan_in = layer.fan_in();
  const std::size_t fan_out = layer.fan_out();
  out = Matrix(batch, fan_out);
  const double* w = layer.weights.values().data();
  for (std::size_t b = 0; b < batch; ++b) {
    double* o = out.row(b).data();
    std::copy(layer.bias.begin(), layer.bias.end(), o);
    const double* x = in.row(b).data();
    for (std::size_t i = 0; i < fan_in; ++i) {
      const double xi = x[i];
      const double* wi = w + i * fan_out;
      for (std::size_t j = 0; j < fan_out; ++j) o[j] += xi * wi[j];
    }
  }
}

void relu_inplace(Matrix& m) {
  for (double& v : m.values()) v = v > 0.0 ? v : 0.0;
}

// Activations of every layer: acts[0] is the input, acts[k] the output of layer
// k-1 (post-ReLU for hidden layers, raw logits for the last).
struct ForwardCache {
  std::vector<Matrix> acts;
};

void forward_batch(const MlpModel& model, const Matrix& input, ForwardCache& cache) {
  const std::size_t n_layers = model.layers.size();
  cache.acts.resize(n_layers + 1);
  cache.acts[0] = input;
  for (std::size_t k = 0; k < n_layers; ++k) {
    dense_forward(cache.acts[k], model.layers[k], cache.acts[k + 1]);
    if (k + 1 < n_layers) relu_inplace(cache.acts[k + 1]);
  }
}

double log_sum_exp(std::span<const double> z) {
  const double m = *std::ranges::max_element(z);
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

std::vector<DenseLayer> zeros_like(const MlpModel& model) {
  std::vector<DenseLayer> out;
  out.reserve(model.layers.size());
  for (const auto& l : model.layers) {
    out.push_back({Matrix(l.fan_in(), l.fan_out()), std::vector<double>(l.fan_out(), 0.0)});
  }
  return out;
}

// Loss and gradients given a filled cache; `grads` must be zero-initialised.
double backward_batch(const MlpModel& model, ForwardCache& cache, std::span<const Acuity> labels,
                      std::vector<DenseLayer>& grads) {
  const std::size_t batch = labels.size();
  const double inv_batch = 1.0 / static_cast<double>(batch);
  const std::size_t n_layers = model.layers.size();

  // delta = (softmax - onehot) / batch at the logits.
  Matrix delta = cache.acts[n_layers];
  double loss = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    auto z = delta.row(b);
    const double lse = log_sum_exp(z);
    const std::size_t truth = data::class_index(labels[b]);
    loss += lse - z[truth];
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = std::exp(z[j] - lse) * inv_batch;
    z[truth] -= inv_batch;
  }

  for (std::size_t k = n_layers; k-- > 0;) {
    const DenseLayer& layer = model.layers[k];
    DenseLayer& g = grads[k];
    const Matrix& in = cache.acts[k];
    const std::size_t fan_in = layer.fan_in();
    const std::size_t fan_out = layer.fan_out();
    double* gw = g.weights.values().data();
    for (std::size_t b = 0; b < batch; ++b) {
      const double* d = delta.row(b).data();
      const double* x = in.row(b).data();
      for (std::size_t i = 0; i < fan_in; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        double* gwi = gw + i * fan_out;
        for (std::size_t j = 0; j < fan_out; ++j) gwi[j] += xi * d[j];
      }
      for (std::size_t j = 0; j < fan_out; ++j) g.bias[j] += d[j];
    }
    if (k == 0) break;

    // Propagate through W and the previous layer's ReLU (active where output > 0).
    Matrix prev(batch, fan_in);
    const double* w = layer.weights.values().data();
    for (std::size_t b = 0; b < batch; ++b) {
      const double* d = delta.row(b).data();
      const double* x = in.row(b).data();
      double* p = prev.row(b).data();
      for (std::size_t i = 0; i < fan_in; ++i) {
        if (x[i] <= 0.0) continue;
        const double* wi = w + i * fan_out;
        double s = 0.0;
        for (std::size_t j = 0; j < fan_out; ++j) s += wi[j] * d[j];
        p[i] = s;
      }
    }
    delta = std::move(prev);
  }
  return loss * inv_batch;
}

struct AdamState {
  std::vector<DenseLayer> m;
  std::vector<DenseLayer> v;
  std::size_t step = 0;
};

void adam_update(double lr, double corr1, double corr2, std::vector<double>& param,
                 const std::vector<double>& grad, std::vector<double>& m, std::vector<double>& v) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g;
    v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g * g;
    param[i] -= lr * (m[i] / corr1) / (std::sqrt(v[i] / corr2) + kEpsilon);
  }
}

void adam_step(MlpModel& model, const std::vector<DenseLayer>& grads, AdamState& state,
               double lr) {
  ++state.step;
  const double corr1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
  const double corr2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    adam_update(lr, corr1, corr2, model.layers[k].weights.values(), grads[k].weights.values(),
                state.m[k].weights.values(), state.v[k].weights.values());
    adam_update(lr, corr1, corr2, model.layers[k].bias, grads[k].bias, state.m[k].bias,
                state.v[k].bias);
  }
}

void reset(std::vector<DenseLayer>& grads) {
  for (auto& g : grads) {
    std::ranges::fill(g.weights.values(), 0.0);
    std::ranges::fill(g.bias, 0.0);
  }
}

}  // namespace

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = features.select_rows(rows);
  out.labels.reserve(rows.size());
  for (auto r : rows) out.labels.push_back(labels[r]);
  return out;
}

std::vector<std::size_t> MlpModel::layer_sizes() const {
  std::vector<std::size_t> sizes;
  if (layers.empty()) return sizes;
  sizes.push_back(layers.front().fan_in());
  for (const auto& l : layers) sizes.push_back(l.fan_out());
  return sizes;
}

std::size_t MlpModel::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.values().size() + l.bias.size();
  return n;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (epochs == 0) throw ConfigError("epochs must be positive");
}

MlpModel make_mlp(std::size_t input_dim, std::span<const std::size_t> hidden_widths,
                  std::uint64_t seed) {
  if (input_dim == 0) throw ConfigError("input dimension must be at least 1");
  std::vector<std::size_t> sizes{input_dim};
  for (auto w : hidden_widths) {
    if (w == 0) throw ConfigError("hidden widths must be at least 1");
    sizes.push_back(w);
  }
  sizes.push_back(kNumClasses);

  Rng rng(seed);
  MlpModel model;
  model.seed = seed;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    const std::size_t fan_in = sizes[k];
    const std::size_t fan_out = sizes[k + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer layer{Matrix(fan_in, fan_out), std::vector<double>(fan_out, 0.0)};
    for (double& w : layer.weights.values()) w = dist(rng);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

MlpModel mlp_init(std::size_t input_dim, std::span<const std::size_t> hidden_widths,
                  std::uint64_t seed) {
  if (hidden_widths.size() != kDefaultHiddenWidths.size()) {
    throw ConfigError("the triage network needs exactly 7 hidden layers, got " +
                      std::to_string(hidden_widths.size()));
  }
  return make_mlp(input_dim, hidden_widths, seed);
}

Probabilities softmax(std::span<const double> logits) {
  if (logits.size() != kNumClasses) throw DimensionError("softmax expects 5 logits");
  const double lse = log_sum_exp(logits);
  Probabilities p{};
  for (std::size_t j = 0; j < kNumClasses; ++j) p[j] = std::exp(logits[j] - lse);
  return p;
}

TriageLabel label_from_probabilities(const Probabilities& p) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < kNumClasses; ++j) {
    if (p[j] > p[best]) best = j;
  }
  return {data::acuity_at(best), p};
}

std::vector<double> mlp_logits(const MlpModel& model, std::span<const double> features) {
  check_input(model, features.size());
  Matrix input(1, features.size(), std::vector<double>(features.begin(), features.end()));
  ForwardCache cache;
  forward_batch(model, input, cache);
  const auto out = cache.acts.back().row(0);
  return {out.begin(), out.end()};
}

TriageLabel mlp_forward(const MlpModel& model, std::span<const double> features) {
  return label_from_probabilities(softmax(mlp_logits(model, features)));
}

Matrix mlp_predict_proba(const MlpModel& model, const Matrix& features) {
  check_input(model, features.cols());
  ForwardCache cache;
  forward_batch(model, features, cache);
  Matrix out(features.rows(), kNumClasses);
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const auto p = softmax(cache.acts.back().row(r));
    std::ranges::copy(p, out.row(r).begin());
  }
  return out;
}

std::vector<Acuity> mlp_predict(const MlpModel& model, const Matrix& features) {
  const Matrix proba = mlp_predict_proba(model, features);
  std::vector<Acuity> out;
  out.reserve(proba.rows());
  for (std::size_t r = 0; r < proba.rows(); ++r) {
    Probabilities p{};
    std::ranges::copy(proba.row(r), p.begin());
    out.push_back(label_from_probabilities(p).acuity);
  }
  return out;
}

LossAndGrad mlp_loss_and_grad(const MlpModel& model, const Matrix& features,
                              std::span<const Acuity> labels) {
  check_input(model, features.cols());
  if (labels.empty()) throw DataError("loss needs a non-empty batch");
  if (labels.size() != features.rows()) throw DimensionError("feature/label count mismatch");
  ForwardCache cache;
  forward_batch(model, features, cache);
  LossAndGrad out;
  out.gradients = zeros_like(model);
  out.loss = backward_batch(model, cache, labels, out.gradients);
  return out;
}

double mlp_loss(const MlpModel& model, const Matrix& features, std::span<const Acuity> labels) {
  check_input(model, features.cols());
  if (labels.empty()) throw DataError("loss needs a non-empty batch");
  if (labels.size() != features.rows()) throw DimensionError("feature/label count mismatch");
  ForwardCache cache;
  forward_batch(model, features, cache);
  double loss = 0.0;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    const auto z = cache.acts.back().row(b);
    loss += log_sum_exp(z) - z[data::class_index(labels[b])];
  }
  return loss / static_cast<double>(labels.size());
}

TrainResult mlp_train(MlpModel model, const Dataset& train, const TrainConfig& config) {
  config.validate();
  if (train.size() == 0) throw DataError("cannot train on an empty set");
  check_input(model, train.dims());
  if (train.features.rows() != train.size()) throw DimensionError("feature/label count mismatch");

  model.seed = config.seed;
  Rng rng(config.seed);
  AdamState adam{zeros_like(model), zeros_like(model), 0};
  auto grads = zeros_like(model);
  ForwardCache cache;

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Acuity> batch_labels;
  TrainResult result;
  result.loss_history.reserve(config.epochs);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> rows(order.data() + start, end - start);
      const Matrix batch = train.features.select_rows(rows);
      batch_labels.clear();
      for (auto r : rows) batch_labels.push_back(train.labels[r]);

      forward_batch(model, batch, cache);
      reset(grads);
      const double loss = backward_batch(model, cache, batch_labels, grads);
      epoch_loss += loss * static_cast<double>(rows.size());
      adam_step(model, grads, adam, config.learning_rate);
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  result.model = std::move(model);
  return result;
}

double accuracy(std::span<const Acuity> predictions, std::span<const Acuity> truth) {
  if (predictions.size() != truth.size()) throw DimensionError("prediction/truth size mismatch");
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predictions[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace artemis::models
