#include "finspect/gknn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "finspect/error.hpp"

namespace finspect {

int chromosome_width(std::size_t n) {
  if (n == 0) fail(ErrorKind::kParameter, "chromosome width needs a non-empty training set");
  if (n > std::numeric_limits<std::uint32_t>::max()) fail(ErrorKind::kParameter, "training set too large");
  return std::max(1, static_cast<int>(std::bit_width(static_cast<std::uint32_t>(n))));
}

Chromosome::Chromosome(std::uint32_t code, int width) : code_(code), width_(width) {
  if (width < 1 || width > 31) fail(ErrorKind::kParameter, "chromosome width must be in [1, 31]");
  if (code >= (1u << width)) fail(ErrorKind::kParameter, "chromosome code does not fit its width");
}

Chromosome Chromosome::for_index(std::size_t index, std::size_t n) {
  if (index >= n) fail(ErrorKind::kParameter, "training index out of range");
  return Chromosome(static_cast<std::uint32_t>(index + 1), chromosome_width(n));
}

MahalanobisContext MahalanobisContext::fit(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 2) fail(ErrorKind::kParameter, "covariance needs at least two training points");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(rows.front().size());
  if (p == 0) fail(ErrorKind::kShape, "training rows are empty");
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != p) fail(ErrorKind::kShape, "training rows differ in length");
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = row[static_cast<std::size_t>(j)];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  return from_covariance((centered.transpose() * centered) / static_cast<double>(n - 1));
}

MahalanobisContext MahalanobisContext::from_covariance(const Eigen::MatrixXd& covariance) {
  if (covariance.rows() != covariance.cols() || covariance.rows() == 0) {
    fail(ErrorKind::kShape, "covariance must be a non-empty square matrix");
  }
  if (!covariance.allFinite()) fail(ErrorKind::kData, "covariance has non-finite entries");
  MahalanobisContext ctx;
  ctx.covariance_ = 0.5 * (covariance + covariance.transpose());
  const Eigen::MatrixXd regularized =
      ctx.covariance_ + kRidge * Eigen::MatrixXd::Identity(covariance.rows(), covariance.cols());
  ctx.factor_.compute(regularized);
  if (ctx.factor_.info() != Eigen::Success || !ctx.factor_.isPositive()) {
    fail(ErrorKind::kSolver, "regularized covariance is not positive definite");
  }
  return ctx;
}

double MahalanobisContext::distance(std::span<const double> a, std::span<const double> b) const {
  const auto p = dimension();
  if (a.size() != p || b.size() != p) {
    fail(ErrorKind::kShape, "Mahalanobis inputs must have " + std::to_string(p) + " features");
  }
  Eigen::VectorXd d(static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; ++i) d(static_cast<Eigen::Index>(i)) = a[i] - b[i];
  const double q = d.dot(factor_.solve(d));
  return std::sqrt(std::max(q, 0.0));
}

double mahalanobis(std::span<const double> xq, std::span<const double> xj, const MahalanobisContext& ctx) {
  return ctx.distance(xq, xj);
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& rho1, const Chromosome& rho2, int v) {
  const int r = rho1.width();
  if (rho2.width() != r) fail(ErrorKind::kParameter, "crossover parents differ in width");
  if (v <= 0 || v >= r) {
    fail(ErrorKind::kParameter, "crossover point " + std::to_string(v) + " outside (0, " + std::to_string(r) + ")");
  }
  const std::uint32_t all = (1u << r) - 1u;
  const std::uint32_t m1 = (1u << r) - (1u << v);
  const std::uint32_t m2 = ~m1 & all;
  return {Chromosome((rho1.code() & m1) | (rho2.code() & m2), r),
          Chromosome((rho2.code() & m1) | (rho1.code() & m2), r)};
}

int RandomDraws::crossover_point(int width) {
  return std::uniform_int_distribution<int>(1, width - 1)(rng_);
}

int RandomDraws::gene(int width) { return std::uniform_int_distribution<int>(0, width - 1)(rng_); }

std::size_t RandomDraws::index(std::size_t bound) {
  return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng_);
}

double RandomDraws::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

Chromosome mutate(const Chromosome& kappa, int v, std::size_t n, GeneticDraws& draws) {
  if (n <= 1) fail(ErrorKind::kDegenerate, "no valid mutation target in a one-element training set");
  const int r = kappa.width();
  if (v < 0 || v >= r) fail(ErrorKind::kParameter, "gene index " + std::to_string(v) + " outside [0, width)");
  auto flip = [&](int bit) { return Chromosome(kappa.code() ^ (1u << bit), r); };

  bool any_valid = false;
  for (int bit = 0; bit < r; ++bit) any_valid = any_valid || flip(bit).valid(n);
  if (!any_valid) return kappa;

  Chromosome out = flip(v);
  while (!out.valid(n)) out = flip(draws.gene(r));
  return out;
}

void GknnConfig::validate() const {
  if (k < 1) fail(ErrorKind::kParameter, "k must be >= 1");
  if (max_generations < 1) fail(ErrorKind::kParameter, "max generations must be >= 1");
}

double gknn_fitness(double distance) { return 1.0 / (1.0 + distance); }

GknnClassifier::GknnClassifier(LabeledSet training, GknnConfig config)
    : training_(std::move(training)), config_(config) {
  config_.validate();
  training_.validate();
  if (static_cast<std::size_t>(config_.k) > training_.size()) {
    fail(ErrorKind::kParameter, "k = " + std::to_string(config_.k) + " exceeds training size " +
                                    std::to_string(training_.size()));
  }
  context_ = MahalanobisContext::fit(training_.inputs);
}

GknnResult GknnClassifier::classify(std::span<const double> xq, std::uint64_t seed) const {
  RandomDraws draws(seed);
  return classify(xq, draws);
}

namespace {

void append_unique(std::vector<std::size_t>& out, std::size_t value) {
  if (std::find(out.begin(), out.end(), value) == out.end()) out.push_back(value);
}

}  // namespace

GknnResult GknnClassifier::classify(std::span<const double> xq, GeneticDraws& draws,
                                    std::optional<std::vector<std::size_t>> initial) const {
  const std::size_t n = training_.size();
  const auto k = static_cast<std::size_t>(config_.k);
  const int r = chromosome_width(n);
  if (xq.size() != training_.dimension()) fail(ErrorKind::kShape, "query dimension does not match training data");

  std::vector<double> cache(n, std::numeric_limits<double>::quiet_NaN());
  auto dist = [&](std::size_t i) {
    if (std::isnan(cache[i])) cache[i] = context_.distance(xq, training_.inputs[i]);
    return cache[i];
  };
  auto by_fitness = [&](std::vector<std::size_t>& members) {
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      const double da = dist(a);
      const double db = dist(b);
      return da != db ? da < db : a < b;
    });
  };
  auto total_fitness = [&](const std::vector<std::size_t>& sorted) {
    double sum = 0.0;
    for (std::size_t i : sorted) sum += gknn_fitness(dist(i));
    return sum;
  };

  std::vector<std::size_t> population;
  if (initial) {
    population = *initial;
    if (population.size() != k) fail(ErrorKind::kParameter, "initial population must have k members");
    for (std::size_t i : population) {
      if (i >= n) fail(ErrorKind::kParameter, "initial population index out of range");
    }
    std::vector<std::size_t> unique = population;
    std::sort(unique.begin(), unique.end());
    if (std::adjacent_find(unique.begin(), unique.end()) != unique.end()) {
      fail(ErrorKind::kParameter, "initial population members must be distinct");
    }
  } else {
    // Partial Fisher-Yates: k distinct indices.
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[i + draws.index(n - i)]);
    population.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
  }
  by_fitness(population);
  double current = total_fitness(population);

  auto select = [&](std::vector<std::size_t> pool) {
    by_fitness(pool);
    if (config_.selection == Selection::kTruncation || pool.size() <= k) {
      pool.resize(std::min(pool.size(), k));
      return pool;
    }
    // Elitist roulette wheel without replacement.
    std::vector<std::size_t> chosen{pool.front()};
    std::vector<std::size_t> rest(pool.begin() + 1, pool.end());
    while (chosen.size() < k) {
      double sum = 0.0;
      for (std::size_t i : rest) sum += gknn_fitness(dist(i));
      const double target = draws.uniform() * sum;
      double acc = 0.0;
      std::size_t pick = rest.size() - 1;
      for (std::size_t j = 0; j < rest.size(); ++j) {
        acc += gknn_fitness(dist(rest[j]));
        if (target < acc) {
          pick = j;
          break;
        }
      }
      chosen.push_back(rest[pick]);
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    by_fitness(chosen);
    return chosen;
  };

  GknnResult result;
  bool converged = false;
  for (int gen = 0; gen < config_.max_generations; ++gen) {
    GknnGeneration record;
    record.population = population;
    record.total_fitness = current;

    if (r >= 2) {
      for (std::size_t p = 0; p + 1 < population.size(); p += 2) {
        const int v = draws.crossover_point(r);
        auto [a, b] = crossover(Chromosome::for_index(population[p], n), Chromosome::for_index(population[p + 1], n), v);
        if (a.valid(n)) record.offspring.push_back(a);
        if (b.valid(n)) record.offspring.push_back(b);
      }
    }

    std::vector<std::size_t> t_set = population;
    for (const Chromosome& c : record.offspring) append_unique(t_set, c.index());
    for (std::size_t i : t_set) {
      const Chromosome m = mutate(Chromosome::for_index(i, n), draws.gene(r), n, draws);
      record.mutated.push_back(m);
    }

    std::vector<std::size_t> pool = t_set;
    for (const Chromosome& c : record.mutated) append_unique(pool, c.index());
    record.selected = select(std::move(pool));
    const double next = total_fitness(record.selected);
    result.trace.push_back(record);

    if (next <= current) {
      converged = true;
      break;
    }
    population = result.trace.back().selected;
    current = next;
  }
  result.hit_generation_cap = !converged;

  result.population = population;
  result.omega.assign(static_cast<std::size_t>(training_.classes), 0.0);
  for (std::size_t i : population) {
    result.distances.push_back(dist(i));
    result.omega[static_cast<std::size_t>(training_.labels[i])] += 1.0 / static_cast<double>(k);
  }
  return result;
}

}  // namespace finspect
