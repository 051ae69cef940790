#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "artemis/data/normalize.hpp"
#include "artemis/data/vitals.hpp"
#include "artemis/matrix.hpp"

namespace artemis::models {

using data::Acuity;
using data::kNumClasses;

using Probabilities = std::array<double, kNumClasses>;

struct TriageLabel {
  Acuity acuity = Acuity::Minor;
  Probabilities probabilities{};
};

// Labelled, already-normalized feature rows.
struct Dataset {
  Matrix features;
  std::vector<Acuity> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dims() const noexcept { return features.cols(); }
  Dataset subset(std::span<const std::size_t> rows) const;
};

// Fully connected layer; `weights` is fan_in x fan_out.
struct DenseLayer {
  Matrix weights;
  std::vector<double> bias;

  std::size_t fan_in() const noexcept { return weights.rows(); }
  std::size_t fan_out() const noexcept { return weights.cols(); }
  bool operator==(const DenseLayer&) const = default;
};

// ReLU hidden layers, softmax over the five acuity classes.
struct MlpModel {
  std::vector<DenseLayer> layers;
  data::NormalizationParams normalizer;  // empty for weak learners
  std::uint64_t seed = 0;

  std::size_t input_dim() const noexcept { return layers.empty() ? 0 : layers.front().fan_in(); }
  std::vector<std::size_t> layer_sizes() const;  // input, hidden..., output
  std::size_t parameter_count() const noexcept;
  bool operator==(const MlpModel&) const = default;
};

inline constexpr std::array<std::size_t, 7> kDefaultHiddenWidths = {64, 64, 32, 32, 16, 16, 8};

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 128;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

// Any number of hidden layers; Glorot-uniform weights, zero biases.
MlpModel make_mlp(std::size_t input_dim, std::span<const std::size_t> hidden_widths,
                  std::uint64_t seed);

// The triage network: exactly seven hidden layers.
MlpModel mlp_init(std::size_t input_dim, std::span<const std::size_t> hidden_widths,
                  std::uint64_t seed);

Probabilities softmax(std::span<const double> logits);

// Argmax with ties resolved toward the more severe class.
TriageLabel label_from_probabilities(const Probabilities& p);

std::vector<double> mlp_logits(const MlpModel& model, std::span<const double> features);
TriageLabel mlp_forward(const MlpModel& model, std::span<const double> features);

// Row-wise class probabilities for a batch.
Matrix mlp_predict_proba(const MlpModel& model, const Matrix& features);
std::vector<Acuity> mlp_predict(const MlpModel& model, const Matrix& features);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<DenseLayer> gradients;  // same shapes as the model's layers
};

// Mean cross-entropy over the batch and its gradient by backpropagation.
LossAndGrad mlp_loss_and_grad(const MlpModel& model, const Matrix& features,
                              std::span<const Acuity> labels);
double mlp_loss(const MlpModel& model, const Matrix& features, std::span<const Acuity> labels);

struct TrainResult {
  MlpModel model;
  std::vector<double> loss_history;  // mean mini-batch loss per epoch
};

// Mini-batch Adam (beta1 0.9, beta2 0.999, eps 1e-8), reshuffling every epoch.
TrainResult mlp_train(MlpModel model, const Dataset& train, const TrainConfig& config);

double accuracy(std::span<const Acuity> predictions, std::span<const Acuity> truth);

}  // namespace artemis::models
