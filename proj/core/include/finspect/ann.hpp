#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "finspect/dataset.hpp"

namespace finspect::ann {

// Logistic activation; saturates instead of producing NaN.
double sigmoid(double z);

// Dense layer l: weights[j * inputs + k] connects neuron k of layer l-1 to
// neuron j of layer l.
struct Layer {
  int inputs = 0;
  int outputs = 0;
  std::vector<double> weights;
  std::vector<double> biases;

  double weight(int j, int k) const { return weights[static_cast<std::size_t>(j) * inputs + k]; }
  double& weight(int j, int k) { return weights[static_cast<std::size_t>(j) * inputs + k]; }
};

class MlpModel {
 public:
  MlpModel() = default;
  // Zero-initialized network with the given layer sizes (input first).
  explicit MlpModel(std::vector<int> sizes);

  const std::vector<int>& sizes() const noexcept { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  std::vector<Layer>& layers() noexcept { return layers_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }

  void validate() const;

  friend bool operator==(const MlpModel& a, const MlpModel& b) {
    if (a.sizes_ != b.sizes_) return false;
    for (std::size_t l = 0; l < a.layers_.size(); ++l) {
      if (a.layers_[l].weights != b.layers_[l].weights || a.layers_[l].biases != b.layers_[l].biases) return false;
    }
    return true;
  }

 private:
  std::vector<int> sizes_;
  std::vector<Layer> layers_;
};

// outputs[0] is the input; outputs.back() is o^L.
struct Activations {
  std::vector<std::vector<double>> outputs;
  const std::vector<double>& final() const { return outputs.back(); }
};

Activations feedforward(const MlpModel& model, std::span<const double> x);

// Mean over rows of -sum_j [y ln o + (1 - y) ln(1 - o)]; o clamped to
// [1e-12, 1 - 1e-12].
double cross_entropy(const std::vector<std::vector<double>>& outputs,
                     const std::vector<std::vector<double>>& targets);

struct Gradients {
  std::vector<std::vector<double>> weights;  // same layout as Layer::weights
  std::vector<std::vector<double>> biases;
};

// Gradients of cross_entropy over the batch. Targets need not be one-hot.
Gradients backprop(const MlpModel& model, const std::vector<std::vector<double>>& inputs,
                   const std::vector<std::vector<double>>& targets);

MlpModel sgd_step(MlpModel model, const Gradients& grads, double learning_rate);

struct TrainConfig {
  int hidden = 16;
  double learning_rate = 0.5;
  int epochs = 2000;
  std::uint64_t seed = 0;
  double init_scale = 0.5;

  void validate() const;
};

struct TrainResult {
  MlpModel model;
  std::vector<double> loss_trace;  // loss before each epoch's update
};

// One hidden layer, one-against-all sigmoid outputs, full-batch descent.
TrainResult train(const TrainConfig& config, const LabeledSet& data);

// Sigmoid outputs normalized to sum to one.
std::vector<double> predict_proba(const MlpModel& model, std::span<const double> x);

}  // namespace finspect::ann
