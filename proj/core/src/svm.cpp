#include "finspect/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "finspect/error.hpp"

namespace finspect {

double kernel_linear(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::kShape, "kernel inputs differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Kernel Kernel::by_name(const std::string& name) {
  if (name == "linear") return linear();
  fail(ErrorKind::kConfiguration, "unknown kernel '" + name + "'");
}

void SvmConfig::validate() const {
  if (!(A > 0.0) || !std::isfinite(A)) fail(ErrorKind::kParameter, "A must be positive");
  if (!(tol > 0.0)) fail(ErrorKind::kParameter, "tol must be positive");
  if (max_iter < 1) fail(ErrorKind::kParameter, "max_iter must be >= 1");
}

double dual_objective(const std::vector<std::vector<double>>& gram, const DualMatrix& eta,
                      std::span<const int> labels, double A) {
  const std::size_t n = eta.size();
  double linear = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    linear += eta[i][static_cast<std::size_t>(labels[i])];
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < eta[i].size(); ++c) dot += eta[i][c] * eta[j][c];
      quad += gram[i][j] * dot;
    }
  }
  return A * linear - quad;
}

std::vector<double> project_row(std::span<const double> u, int y) {
  const std::size_t k = u.size();
  if (y < 0 || static_cast<std::size_t>(y) >= k) fail(ErrorKind::kParameter, "label outside row");
  auto bound = [&](std::size_t r) { return r == static_cast<std::size_t>(y) ? 1.0 : 0.0; };

  // tau_r = min(b_r, u_r - theta); components with u_r - b_r <= theta are free.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] - bound(a) < u[b] - bound(b); });

  double clamped = 1.0;  // sum of all bounds
  double free_sum = 0.0;
  double theta = 0.0;
  for (std::size_t m = 1; m <= k; ++m) {
    const std::size_t r = order[m - 1];
    clamped -= bound(r);
    free_sum += u[r];
    theta = (clamped + free_sum) / static_cast<double>(m);
    const double next = m < k ? u[order[m]] - bound(order[m]) : std::numeric_limits<double>::infinity();
    if (theta <= next) break;
  }
  std::vector<double> tau(k);
  for (std::size_t r = 0; r < k; ++r) tau[r] = std::min(bound(r), u[r] - theta);
  return tau;
}

SvmModel train_svm(const LabeledSet& data, const SvmConfig& config, const Kernel& kernel,
                   const SweepObserver& observer) {
  config.validate();
  data.validate();
  if (data.size() < 2) fail(ErrorKind::kParameter, "SVM training needs at least two examples");
  if (data.classes_present() < 2) fail(ErrorKind::kParameter, "SVM training needs at least two classes");

  const std::size_t n = data.size();
  const auto k = static_cast<std::size_t>(data.classes);
  std::vector<std::vector<double>> gram(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = kernel.eval(data.inputs[i], data.inputs[j]);
      if (!std::isfinite(v)) fail(ErrorKind::kData, "non-finite kernel value");
      gram[i][j] = gram[j][i] = v;
    }
  }

  SvmModel model;
  model.eta.assign(n, std::vector<double>(k, 0.0));
  model.A = config.A;
  model.kernel = kernel;
  model.inputs = data.inputs;
  model.labels = data.labels;
  model.classes = data.classes;

  double objective = 0.0;
  model.objective_trace.push_back(objective);
  constexpr double kTinyDiagonal = 1e-12;

  std::vector<double> v(k);
  std::vector<double> u(k);
  for (int sweep = 1; sweep <= config.max_iter; ++sweep) {
    double max_gain = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double kii = gram[i][i];
      if (kii <= kTinyDiagonal) continue;
      std::fill(v.begin(), v.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || gram[i][j] == 0.0) continue;
        for (std::size_t c = 0; c < k; ++c) v[c] += gram[i][j] * model.eta[j][c];
      }
      const auto yi = static_cast<std::size_t>(data.labels[i]);
      // Row objective: tau . (A delta - 2 v) - K_ii |tau|^2.
      auto row_value = [&](const std::vector<double>& tau) {
        double s = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
          const double lin = (c == yi ? config.A : 0.0) - 2.0 * v[c];
          s += tau[c] * lin - kii * tau[c] * tau[c];
        }
        return s;
      };
      for (std::size_t c = 0; c < k; ++c) u[c] = ((c == yi ? config.A : 0.0) - 2.0 * v[c]) / (2.0 * kii);
      std::vector<double> tau = project_row(u, data.labels[i]);
      const double gain = row_value(tau) - row_value(model.eta[i]);
      if (gain > 0.0) {
        model.eta[i] = std::move(tau);
        objective += gain;
        max_gain = std::max(max_gain, gain);
      }
    }
    model.sweeps = sweep;
    model.objective_trace.push_back(objective);
    if (observer) observer(sweep, model.eta, objective);
    if (max_gain < config.tol) {
      model.converged = true;
      break;
    }
  }
  return model;
}

std::vector<double> confidence(const SvmModel& model, std::span<const double> x) {
  std::vector<double> conf(static_cast<std::size_t>(model.classes), 0.0);
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (model.inputs[i].size() != x.size()) fail(ErrorKind::kShape, "query dimension does not match model");
    const double kv = model.kernel.eval(model.inputs[i], x);
    for (std::size_t c = 0; c < conf.size(); ++c) conf[c] += model.eta[i][c] * kv;
  }
  return conf;
}

int predict(const SvmModel& model, std::span<const double> x) {
  const auto conf = confidence(model, x);
  return static_cast<int>(std::max_element(conf.begin(), conf.end()) - conf.begin());
}

std::vector<double> predict_proba(const SvmModel& model, std::span<const double> x) {
  std::vector<double> w = confidence(model, x);
  const double lo = *std::min_element(w.begin(), w.end());
  double sum = 0.0;
  for (double& c : w) {
    c = c - lo + 1e-9;
    sum += c;
  }
  for (double& c : w) c /= sum;
  return w;
}

double empirical_error(const SvmModel& model, const LabeledSet& data) {
  data.validate();
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (predict(model, data.inputs[i]) != data.labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

double margin_error_bound(const SvmModel& model, const LabeledSet& data) {
  data.validate();
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto conf = confidence(model, data.inputs[i]);
    const auto y = static_cast<std::size_t>(data.labels[i]);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < conf.size(); ++j) best = std::max(best, conf[j] / model.A + (j == y ? 0.0 : 1.0));
    total += best - conf[y] / model.A;
  }
  return total / static_cast<double>(data.size());
}

double Hyperplane::evaluate(std::span<const double> x) const { return kernel_linear(w, x) + b; }

Hyperplane two_point_hyperplane(std::span<const double> first, std::span<const double> second) {
  if (first.size() != second.size()) fail(ErrorKind::kShape, "points differ in dimension");
  std::vector<double> d(first.size());
  double norm2 = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = second[i] - first[i];
    norm2 += d[i] * d[i];
  }
  if (!(norm2 > 0.0)) fail(ErrorKind::kDegenerate, "the two points coincide");
  Hyperplane h;
  h.w.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) h.w[i] = 2.0 * d[i] / norm2;
  h.b = -1.0 - kernel_linear(h.w, first);
  return h;
}

}  // namespace finspect
