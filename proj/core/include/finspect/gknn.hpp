#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "finspect/dataset.hpp"

namespace finspect {

// r = number of bits needed to write n.
int chromosome_width(std::size_t n);

// Binary-encoded training index. Codes are 1-based: training row i has code
// i + 1, so valid codes for a set of n rows are 1..n.
class Chromosome {
 public:
  Chromosome() = default;
  Chromosome(std::uint32_t code, int width);

  static Chromosome for_index(std::size_t index, std::size_t n);

  std::uint32_t code() const noexcept { return code_; }
  int width() const noexcept { return width_; }
  std::size_t index() const { return static_cast<std::size_t>(code_) - 1; }
  bool valid(std::size_t n) const noexcept { return code_ >= 1 && code_ <= n; }

  friend bool operator==(const Chromosome&, const Chromosome&) = default;

 private:
  std::uint32_t code_ = 1;
  int width_ = 1;
};

// Covariance of the training rows (unbiased, n - 1) with a 1e-6 ridge.
class MahalanobisContext {
 public:
  static constexpr double kRidge = 1e-6;

  static MahalanobisContext fit(const std::vector<std::vector<double>>& rows);
  // Uses the given covariance directly (ridge still added).
  static MahalanobisContext from_covariance(const Eigen::MatrixXd& covariance);

  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(covariance_.rows()); }
  double distance(std::span<const double> a, std::span<const double> b) const;

 private:
  Eigen::MatrixXd covariance_;
  Eigen::LDLT<Eigen::MatrixXd> factor_;
};

double mahalanobis(std::span<const double> xq, std::span<const double> xj, const MahalanobisContext& ctx);

// Offspring with m1 = 2^r - 2^v (high bits) and m2 = NOT m1. Requires 0 < v < r.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& rho1, const Chromosome& rho2, int v);

// Source of the random choices the genetic search makes. Tests replace it to
// replay a fixed trace.
class GeneticDraws {
 public:
  virtual ~GeneticDraws() = default;
  virtual int crossover_point(int width) = 0;       // in [1, width - 1]
  virtual int gene(int width) = 0;                  // in [0, width - 1]
  virtual std::size_t index(std::size_t bound) = 0;  // in [0, bound - 1]
  virtual double uniform() = 0;                     // in [0, 1)
};

class RandomDraws final : public GeneticDraws {
 public:
  explicit RandomDraws(std::uint64_t seed) : rng_(seed) {}
  int crossover_point(int width) override;
  int gene(int width) override;
  std::size_t index(std::size_t bound) override;
  double uniform() override;

 private:
  std::mt19937_64 rng_;
};

// Flips bit v. When the result is not a valid code, genes are redrawn until
// one is; when no flip is valid the chromosome comes back unchanged.
// Throws kDegenerate for n = 1.
Chromosome mutate(const Chromosome& kappa, int v, std::size_t n, GeneticDraws& draws);

enum class Selection { kRoulette, kTruncation };

struct GknnConfig {
  int k = 5;
  Selection selection = Selection::kRoulette;
  int max_generations = 100;

  void validate() const;
};

struct GknnGeneration {
  std::vector<std::size_t> population;  // P_t, fitness-sorted
  std::vector<Chromosome> offspring;    // Q_t
  std::vector<Chromosome> mutated;      // N_t
  std::vector<std::size_t> selected;    // candidate P_{t+1}
  double total_fitness = 0.0;           // of P_t
};

struct GknnResult {
  std::vector<double> omega;           // vote share per class
  std::vector<std::size_t> population;  // final k training indices, fitness-sorted
  std::vector<double> distances;        // Mahalanobis distance of each member
  std::vector<GknnGeneration> trace;
  bool hit_generation_cap = false;
};

// Fitness used for selection: 1 / (1 + distance).
double gknn_fitness(double distance);

class GknnClassifier {
 public:
  GknnClassifier(LabeledSet training, GknnConfig config);

  const LabeledSet& training() const noexcept { return training_; }
  const GknnConfig& config() const noexcept { return config_; }
  const MahalanobisContext& context() const noexcept { return context_; }

  GknnResult classify(std::span<const double> xq, std::uint64_t seed) const;
  // initial: optional P_0 as training indices (must have k distinct entries).
  GknnResult classify(std::span<const double> xq, GeneticDraws& draws,
                      std::optional<std::vector<std::size_t>> initial = std::nullopt) const;

 private:
  LabeledSet training_;
  GknnConfig config_;
  MahalanobisContext context_;
};

}  // namespace finspect
