#include "finspect/ann.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "finspect/error.hpp"

namespace finspect::ann {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

MlpModel::MlpModel(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) fail(ErrorKind::kParameter, "an MLP needs at least input and output layers");
  for (int s : sizes_) {
    if (s < 1) fail(ErrorKind::kParameter, "layer sizes must be positive");
  }
  for (std::size_t l = 1; l < sizes_.size(); ++l) {
    Layer layer;
    layer.inputs = sizes_[l - 1];
    layer.outputs = sizes_[l];
    layer.weights.assign(static_cast<std::size_t>(layer.inputs) * layer.outputs, 0.0);
    layer.biases.assign(static_cast<std::size_t>(layer.outputs), 0.0);
    layers_.push_back(std::move(layer));
  }
}

void MlpModel::validate() const {
  if (sizes_.size() != layers_.size() + 1) fail(ErrorKind::kShape, "layer count does not match sizes");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    if (layer.inputs != sizes_[l] || layer.outputs != sizes_[l + 1] ||
        layer.weights.size() != static_cast<std::size_t>(layer.inputs) * layer.outputs ||
        layer.biases.size() != static_cast<std::size_t>(layer.outputs)) {
      fail(ErrorKind::kShape, "weight array does not match layer sizes");
    }
    for (double v : layer.weights) {
      if (!std::isfinite(v)) fail(ErrorKind::kData, "non-finite weight");
    }
    for (double v : layer.biases) {
      if (!std::isfinite(v)) fail(ErrorKind::kData, "non-finite bias");
    }
  }
}

Activations feedforward(const MlpModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.input_size()) {
    fail(ErrorKind::kShape, "input has " + std::to_string(x.size()) + " features, model expects " +
                                std::to_string(model.input_size()));
  }
  Activations act;
  act.outputs.emplace_back(x.begin(), x.end());
  for (const Layer& layer : model.layers()) {
    const auto& prev = act.outputs.back();
    std::vector<double> out(static_cast<std::size_t>(layer.outputs));
    for (int j = 0; j < layer.outputs; ++j) {
      double z = layer.biases[static_cast<std::size_t>(j)];
      for (int k = 0; k < layer.inputs; ++k) z += layer.weight(j, k) * prev[static_cast<std::size_t>(k)];
      out[static_cast<std::size_t>(j)] = sigmoid(z);
    }
    act.outputs.push_back(std::move(out));
  }
  return act;
}

double cross_entropy(const std::vector<std::vector<double>>& outputs,
                     const std::vector<std::vector<double>>& targets) {
  if (outputs.size() != targets.size() || outputs.empty()) {
    fail(ErrorKind::kShape, "cross entropy needs matching, non-empty output and target batches");
  }
  constexpr double kClamp = 1e-12;
  double total = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (outputs[i].size() != targets[i].size()) fail(ErrorKind::kShape, "output/target width mismatch");
    for (std::size_t j = 0; j < outputs[i].size(); ++j) {
      const double o = std::clamp(outputs[i][j], kClamp, 1.0 - kClamp);
      const double y = targets[i][j];
      total -= y * std::log(o) + (1.0 - y) * std::log(1.0 - o);
    }
  }
  return total / static_cast<double>(outputs.size());
}

Gradients backprop(const MlpModel& model, const std::vector<std::vector<double>>& inputs,
                   const std::vector<std::vector<double>>& targets) {
  if (inputs.empty() || inputs.size() != targets.size()) {
    fail(ErrorKind::kShape, "backprop needs a non-empty batch with one target per input");
  }
  const auto& layers = model.layers();
  Gradients grads;
  for (const Layer& layer : layers) {
    grads.weights.emplace_back(layer.weights.size(), 0.0);
    grads.biases.emplace_back(layer.biases.size(), 0.0);
  }
  const double inv_n = 1.0 / static_cast<double>(inputs.size());

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Activations act = feedforward(model, inputs[i]);
    if (static_cast<int>(targets[i].size()) != model.output_size()) {
      fail(ErrorKind::kShape, "target width does not match output layer");
    }
    // Output error for sigmoid + cross entropy: (o - y) / n.
    std::vector<double> delta(act.final().size());
    for (std::size_t j = 0; j < delta.size(); ++j) delta[j] = (act.final()[j] - targets[i][j]) * inv_n;

    for (std::size_t l = layers.size(); l-- > 0;) {
      const Layer& layer = layers[l];
      const auto& prev = act.outputs[l];
      for (int j = 0; j < layer.outputs; ++j) {
        const double d = delta[static_cast<std::size_t>(j)];
        grads.biases[l][static_cast<std::size_t>(j)] += d;
        for (int k = 0; k < layer.inputs; ++k) {
          grads.weights[l][static_cast<std::size_t>(j) * layer.inputs + k] += d * prev[static_cast<std::size_t>(k)];
        }
      }
      if (l == 0) break;
      // delta^{l-1}_k = o_k (1 - o_k) sum_j w_jk delta^l_j
      std::vector<double> next(static_cast<std::size_t>(layer.inputs), 0.0);
      for (int k = 0; k < layer.inputs; ++k) {
        double s = 0.0;
        for (int j = 0; j < layer.outputs; ++j) s += layer.weight(j, k) * delta[static_cast<std::size_t>(j)];
        const double o = prev[static_cast<std::size_t>(k)];
        next[static_cast<std::size_t>(k)] = o * (1.0 - o) * s;
      }
      delta = std::move(next);
    }
  }
  return grads;
}

MlpModel sgd_step(MlpModel model, const Gradients& grads, double learning_rate) {
  if (!(learning_rate > 0.0)) fail(ErrorKind::kParameter, "learning rate must be positive");
  auto& layers = model.layers();
  if (grads.weights.size() != layers.size() || grads.biases.size() != layers.size()) {
    fail(ErrorKind::kShape, "gradient layer count mismatch");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (grads.weights[l].size() != layers[l].weights.size() || grads.biases[l].size() != layers[l].biases.size()) {
      fail(ErrorKind::kShape, "gradient shape mismatch");
    }
    for (std::size_t w = 0; w < layers[l].weights.size(); ++w) layers[l].weights[w] -= learning_rate * grads.weights[l][w];
    for (std::size_t b = 0; b < layers[l].biases.size(); ++b) layers[l].biases[b] -= learning_rate * grads.biases[l][b];
  }
  return model;
}

void TrainConfig::validate() const {
  if (hidden < 1) fail(ErrorKind::kParameter, "hidden width must be >= 1");
  if (!(learning_rate > 0.0)) fail(ErrorKind::kParameter, "learning rate must be positive");
  if (epochs < 1) fail(ErrorKind::kParameter, "epochs must be >= 1");
  if (!(init_scale > 0.0)) fail(ErrorKind::kParameter, "init scale must be positive");
}

TrainResult train(const TrainConfig& config, const LabeledSet& data) {
  config.validate();
  data.validate();

  MlpModel model({static_cast<int>(data.dimension()), config.hidden, data.classes});
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> init(-config.init_scale, config.init_scale);
  for (Layer& layer : model.layers()) {
    for (double& w : layer.weights) w = init(rng);
    for (double& b : layer.biases) b = init(rng);
  }

  std::vector<std::vector<double>> targets;
  targets.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) targets.push_back(data.one_hot(i));

  TrainResult result;
  result.loss_trace.reserve(static_cast<std::size_t>(config.epochs));
  std::vector<std::vector<double>> outputs(data.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = 0; i < data.size(); ++i) outputs[i] = feedforward(model, data.inputs[i]).final();
    const double loss = cross_entropy(outputs, targets);
    if (!std::isfinite(loss)) {
      fail(ErrorKind::kDiverged, "non-finite loss at epoch " + std::to_string(epoch));
    }
    result.loss_trace.push_back(loss);
    const Gradients grads = backprop(model, data.inputs, targets);
    model = sgd_step(std::move(model), grads, config.learning_rate);
  }
  model.validate();
  result.model = std::move(model);
  return result;
}

std::vector<double> predict_proba(const MlpModel& model, std::span<const double> x) {
  std::vector<double> out = feedforward(model, x).final();
  double sum = 0.0;
  for (double& o : out) {
    o = std::clamp(o, 0.0, 1.0);
    sum += o;
  }
  if (!(sum > 0.0)) return std::vector<double>(out.size(), 1.0 / static_cast<double>(out.size()));
  for (double& o : out) o /= sum;
  return out;
}

}  // namespace finspect::ann
