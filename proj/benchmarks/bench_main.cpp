#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "finspect/features.hpp"
#include "finspect/fusion.hpp"
#include "finspect/gknn.hpp"
#include "finspect/preprocess.hpp"
#include "finspect/svm.hpp"
#include "finspect/synthetic.hpp"

using namespace finspect;

namespace {

GrayImage fin_image(int canvas) {
  SyntheticShapeSpec s;
  s.kind = ShapeKind::kFinPolygon;
  s.size = canvas / 5;
  s.canvas_width = canvas;
  s.canvas_height = canvas;
  s.noise = 0.05;
  return generate_synthetic(s, 1);
}

LabeledSet gaussian_classes(int n, int dim, int classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  LabeledSet s;
  s.classes = classes;
  for (int i = 0; i < n; ++i) {
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) x[static_cast<std::size_t>(d)] = g(rng) + (d == i % classes ? 2.0 : 0.0);
    s.inputs.push_back(x);
    s.labels.push_back(i % classes);
  }
  return s;
}

void BM_Otsu(benchmark::State& state) {
  const GrayImage img = fin_image(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(otsu_threshold(img));
}
BENCHMARK(BM_Otsu)->Arg(64)->Arg(256);

void BM_Preprocess(benchmark::State& state) {
  const GrayImage img = fin_image(static_cast<int>(state.range(0)));
  const PreprocessConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(preprocess(img, config));
}
BENCHMARK(BM_Preprocess)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Cmi(benchmark::State& state) {
  const GrayImage img = fin_image(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cmi_features(img));
}
BENCHMARK(BM_Cmi)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Gfd(benchmark::State& state) {
  const GrayImage img = fin_image(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gfd_features(img));
}
BENCHMARK(BM_Gfd)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Elm(benchmark::State& state) {
  const GrayImage img = fin_image(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(elm_features(img));
}
BENCHMARK(BM_Elm)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SvmTrain(benchmark::State& state) {
  const LabeledSet data = gaussian_classes(static_cast<int>(state.range(0)), 8, 3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(train_svm(data));
}
BENCHMARK(BM_SvmTrain)->Arg(30)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_GknnClassify(benchmark::State& state) {
  const LabeledSet data = gaussian_classes(static_cast<int>(state.range(0)), 8, 3, 4);
  const GknnClassifier clf(data, {});
  const std::vector<double> q(8, 0.5);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(clf.classify(q, ++seed));
}
BENCHMARK(BM_GknnClassify)->Arg(40)->Arg(400);

void BM_TwoStageFuse(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  auto row = [&] {
    std::vector<double> r{u(rng), u(rng), u(rng), u(rng)};
    double s = 0.0;
    for (double v : r) s += v;
    for (double& v : r) v /= s;
    return r;
  };
  std::vector<LabeledGroups> training;
  for (int i = 0; i < 40; ++i) {
    LabeledGroups g;
    g.label = i % 4;
    for (int e = 0; e < 3; ++e) g.groups.push_back(DecisionProfile{{row(), row(), row()}});
    training.push_back(g);
  }
  const TwoStageTemplates t = fit_two_stage(training, 4);
  for (auto _ : state) benchmark::DoNotOptimize(two_stage_fuse(training.front().groups, t));
}
BENCHMARK(BM_TwoStageFuse);

}  // namespace

BENCHMARK_MAIN();
