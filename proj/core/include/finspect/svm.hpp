#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "finspect/dataset.hpp"

namespace finspect {

double kernel_linear(std::span<const double> a, std::span<const double> b);

struct Kernel {
  std::string name = "linear";
  std::function<double(std::span<const double>, std::span<const double>)> eval = kernel_linear;

  static Kernel linear() { return {}; }
  // Looks a kernel up by its persisted name.
  static Kernel by_name(const std::string& name);
};

struct SvmConfig {
  double A = 1.0;
  double tol = 1e-3;
  int max_iter = 1000;

  void validate() const;
};

// eta[i][j]: dual coefficient of training row i for class j.
using DualMatrix = std::vector<std::vector<double>>;

struct SvmModel {
  DualMatrix eta;
  double A = 1.0;
  Kernel kernel;
  std::vector<std::vector<double>> inputs;
  std::vector<int> labels;
  int classes = 0;
  int sweeps = 0;
  bool converged = false;            // false: max_iter hit with improvement >= tol
  std::vector<double> objective_trace;  // D before the first sweep, then after each

  std::size_t size() const noexcept { return inputs.size(); }
};

// D = A sum_i eta_i . delta_{y_i} - sum_{i,j} K_ij (eta_i . eta_j)
double dual_objective(const std::vector<std::vector<double>>& gram, const DualMatrix& eta,
                      std::span<const int> labels, double A);

// Euclidean projection of u onto {tau <= delta_y, sum tau = 0}.
std::vector<double> project_row(std::span<const double> u, int y);

// Called after every sweep with the sweep number (1-based), eta and D.
using SweepObserver = std::function<void(int, const DualMatrix&, double)>;

SvmModel train_svm(const LabeledSet& data, const SvmConfig& config = {}, const Kernel& kernel = Kernel::linear(),
                   const SweepObserver& observer = {});

// sum_i eta_ij K(x_i, x) per class j.
std::vector<double> confidence(const SvmModel& model, std::span<const double> x);
int predict(const SvmModel& model, std::span<const double> x);
// Confidences shifted by their minimum, plus 1e-9, normalized.
std::vector<double> predict_proba(const SvmModel& model, std::span<const double> x);

// Fraction of rows whose predicted class differs from the label.
double empirical_error(const SvmModel& model, const LabeledSet& data);
// (1/n) sum_i [max_j (S_j x_i + 1 - delta_{y_i j}) - S_{y_i} x_i] with S = eta / A.
double margin_error_bound(const SvmModel& model, const LabeledSet& data);

// Binary linear classifier F(x) = w.x + b through two points with F(first) = -1
// and F(second) = +1, w parallel to second - first.
struct Hyperplane {
  std::vector<double> w;
  double b = 0.0;

  double evaluate(std::span<const double> x) const;
  // 0 when F(x) <= 0 (side of the first point), 1 otherwise.
  int side(std::span<const double> x) const { return evaluate(x) <= 0.0 ? 0 : 1; }
};

Hyperplane two_point_hyperplane(std::span<const double> first, std::span<const double> second);

}  // namespace finspect
