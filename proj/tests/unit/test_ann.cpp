#include <random>

#include <gtest/gtest.h>

#include "finspect/ann.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace finspect;
using namespace finspect::ann;

namespace {

MlpModel example_network() {
  MlpModel m({2, 1});
  m.layers()[0].weights = {0.5, 0.4};
  m.layers()[0].biases = {0.7};
  return m;
}

MlpModel random_network(const std::vector<int>& sizes, std::uint64_t seed) {
  MlpModel m(sizes);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& layer : m.layers()) {
    for (double& w : layer.weights) w = u(rng);
    for (double& b : layer.biases) b = u(rng);
  }
  return m;
}

double batch_loss(const MlpModel& m, const std::vector<std::vector<double>>& x,
                  const std::vector<std::vector<double>>& y) {
  std::vector<std::vector<double>> out;
  for (const auto& row : x) out.push_back(feedforward(m, row).final());
  return cross_entropy(out, y);
}

}  // namespace

TEST(Sigmoid, KnownValuesAndSaturation) {
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(1.4), 0.802, 5e-4);
  EXPECT_EQ(sigmoid(-1000.0), 0.0);
  EXPECT_EQ(sigmoid(1000.0), 1.0);
  EXPECT_FALSE(std::isnan(sigmoid(-1e308)));
}

TEST(Feedforward, ExampleNetwork) {
  const std::vector<double> x{1.0, 0.5};
  const Activations act = feedforward(example_network(), x);
  EXPECT_NEAR(act.final()[0], 1.0 / (1.0 + std::exp(-1.4)), 1e-15);
  EXPECT_FINSPECT_ERROR(feedforward(example_network(), std::vector<double>{1.0}), ErrorKind::kShape);
}

TEST(CrossEntropy, ExampleValueAtReportedOutput) {
  EXPECT_NEAR(cross_entropy({{0.802}}, {{0.0}}), 1.619488, 1e-5);
}

TEST(CrossEntropy, ClampsSaturatedOutputs) {
  const double e = cross_entropy({{1.0}}, {{0.0}});
  EXPECT_TRUE(std::isfinite(e));
  EXPECT_NEAR(e, -std::log(1e-12), 1e-3);
}

TEST(Backprop, ExampleStep) {
  const MlpModel m = example_network();
  const Gradients g = backprop(m, {{1.0, 0.5}}, {{0.0}});
  const double o = sigmoid(1.4);
  EXPECT_NEAR(g.biases[0][0], o, 1e-15);
  const MlpModel next = sgd_step(m, g, 0.1);
  EXPECT_NEAR(next.layers()[0].weights[0], 0.4198, 1e-4);
  EXPECT_NEAR(next.layers()[0].weights[1], 0.3599, 1e-4);
  EXPECT_NEAR(next.layers()[0].biases[0], 0.6198, 1e-4);
}

TEST(Backprop, MatchesCentralDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const MlpModel m = random_network({3, 4, 2}, trial);
    std::vector<std::vector<double>> x(4, std::vector<double>(3));
    std::vector<std::vector<double>> y(4, std::vector<double>(2));
    for (auto& r : x) for (double& v : r) v = u(rng);
    for (auto& r : y) for (double& v : r) v = u(rng);
    const Gradients g = backprop(m, x, y);
    for (std::size_t l = 0; l < m.layers().size(); ++l) {
      std::vector<double> params = m.layers()[l].weights;
      auto loss_of = [&](const std::vector<double>& w) {
        MlpModel copy = m;
        copy.layers()[l].weights = w;
        return batch_loss(copy, x, y);
      };
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double fd = oracle::central_difference(loss_of, params, i, 1e-5);
        EXPECT_NEAR(g.weights[l][i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST(SgdStep, RejectsMismatchedGradients) {
  Gradients g;
  EXPECT_FINSPECT_ERROR(sgd_step(example_network(), g, 0.1), ErrorKind::kShape);
  EXPECT_FINSPECT_ERROR(sgd_step(example_network(), backprop(example_network(), {{1, 1}}, {{1}}), 0.0),
                        ErrorKind::kParameter);
}

TEST(Train, LearnsSeparableProblemAndLossDecreases) {
  LabeledSet data;
  data.classes = 2;
  for (int i = 0; i < 20; ++i) {
    const double t = i / 19.0;
    data.inputs.push_back({t, 1.0 - t});
    data.labels.push_back(t < 0.5 ? 0 : 1);
  }
  TrainConfig cfg;
  cfg.hidden = 4;
  cfg.epochs = 1500;
  cfg.seed = 3;
  const TrainResult r = train(cfg, data);
  ASSERT_EQ(r.loss_trace.size(), 1500u);
  EXPECT_LT(r.loss_trace.back(), r.loss_trace.front());
  int correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto p = predict_proba(r.model, data.inputs[i]);
    EXPECT_NEAR(p[0] + p[1], 1.0, 1e-12);
    correct += (p[1] > p[0]) == (data.labels[i] == 1);
  }
  EXPECT_GE(correct, 19);
}

TEST(Train, IsDeterministicForASeed) {
  LabeledSet data{{{0, 0}, {1, 1}, {0, 1}}, {0, 1, 1}, 2};
  TrainConfig cfg;
  cfg.epochs = 10;
  EXPECT_EQ(train(cfg, data).model, train(cfg, data).model);
}

TEST(Train, ValidatesConfigAndData) {
  LabeledSet data{{{0, 0}, {1, 1}}, {0, 1}, 2};
  TrainConfig cfg;
  cfg.hidden = 0;
  EXPECT_FINSPECT_ERROR(train(cfg, data), ErrorKind::kParameter);
  LabeledSet bad{{{0, 0}, {1}}, {0, 1}, 2};
  EXPECT_FINSPECT_ERROR(train(TrainConfig{}, bad), ErrorKind::kShape);
}

TEST(Mlp, ValidateDetectsCorruption) {
  MlpModel m = example_network();
  m.layers()[0].weights.push_back(1.0);
  EXPECT_FINSPECT_ERROR(m.validate(), ErrorKind::kShape);
  EXPECT_FINSPECT_ERROR(MlpModel({2}), ErrorKind::kParameter);
}
