#include "finspect/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <Eigen/SparseCholesky>

#include "finspect/error.hpp"

namespace finspect {

MedianWindow::MedianWindow(int side) : side_(side) {
  if (side < 1 || side % 2 == 0) fail(ErrorKind::kParameter, "median window side must be odd and >= 1");
}

GrayImage median_filter(const GrayImage& img, MedianWindow window) {
  const int side = window.side();
  if (side > std::min(img.width(), img.height())) {
    fail(ErrorKind::kParameter, "median window larger than image");
  }
  const int half = side / 2;
  const int w = img.width();
  const int h = img.height();
  std::vector<double> out(img.size());
  std::vector<double> neighbourhood(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
  const auto mid = neighbourhood.begin() + static_cast<std::ptrdiff_t>(neighbourhood.size() / 2);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::size_t k = 0;
      for (int dy = -half; dy <= half; ++dy) {
        const int yy = std::clamp(y + dy, 0, h - 1);
        for (int dx = -half; dx <= half; ++dx) {
          neighbourhood[k++] = img.at(std::clamp(x + dx, 0, w - 1), yy);
        }
      }
      std::nth_element(neighbourhood.begin(), mid, neighbourhood.end());
      out[img.index(x, y)] = *mid;
    }
  }
  return GrayImage(w, h, std::move(out));
}

int Histogram::bin_of(double intensity) {
  return static_cast<int>(std::clamp<long>(std::lround(intensity * 255.0), 0, 255));
}

Histogram Histogram::of(const GrayImage& img) {
  Histogram hist;
  for (double v : img.values()) ++hist.counts[static_cast<std::size_t>(bin_of(v))];
  hist.total = img.size();
  return hist;
}

OtsuSplit otsu_split(const Histogram& hist, int last_background_bin) {
  double w_b = 0.0, w_a = 0.0, s_b = 0.0, s_a = 0.0, q_b = 0.0, q_a = 0.0;
  for (int p = 0; p < 256; ++p) {
    const double pi = hist.probability(p);
    const double v = p / 255.0;
    if (p <= last_background_bin) {
      w_b += pi;
      s_b += pi * v;
      q_b += pi * v * v;
    } else {
      w_a += pi;
      s_a += pi * v;
      q_a += pi * v * v;
    }
  }
  OtsuSplit split;
  split.w_background = w_b;
  split.w_foreground = w_a;
  const double mean = s_b + s_a;
  if (w_b > 0.0) split.mean_background = s_b / w_b;
  if (w_a > 0.0) split.mean_foreground = s_a / w_a;
  const double var_b = w_b > 0.0 ? std::max(q_b / w_b - split.mean_background * split.mean_background, 0.0) : 0.0;
  const double var_a = w_a > 0.0 ? std::max(q_a / w_a - split.mean_foreground * split.mean_foreground, 0.0) : 0.0;
  split.sigma_in = w_b * var_b + w_a * var_a;
  split.sigma_out = w_b * (split.mean_background - mean) * (split.mean_background - mean) +
                    w_a * (split.mean_foreground - mean) * (split.mean_foreground - mean);
  return split;
}

OtsuResult otsu_threshold(const GrayImage& img) {
  if (img.empty()) fail(ErrorKind::kDegenerate, "empty image has no histogram");
  const Histogram hist = Histogram::of(img);
  int lo = 255, hi = 0;
  for (int p = 0; p < 256; ++p) {
    if (hist.counts[static_cast<std::size_t>(p)] > 0) {
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
  }
  if (lo == hi) fail(ErrorKind::kDegenerate, "single-valued histogram: no threshold separates the classes");

  // Candidate t splits bins [0, t-1] | [t, 255]; only splits with both classes
  // occupied are considered.
  std::vector<double> sigma_out(256, -1.0);
  double best = -1.0;
  for (int t = lo + 1; t <= hi; ++t) {
    sigma_out[static_cast<std::size_t>(t)] = otsu_split(hist, t - 1).sigma_out;
    best = std::max(best, sigma_out[static_cast<std::size_t>(t)]);
  }
  const double tie_tol = 1e-12 * std::max(best, 1e-300);
  double theta_sum = 0.0;
  int ties = 0;
  for (int t = lo + 1; t <= hi; ++t) {
    if (best - sigma_out[static_cast<std::size_t>(t)] <= tie_tol) {
      theta_sum += (t - 1) / 255.0;
      ++ties;
    }
  }

  OtsuResult result;
  result.theta = theta_sum / ties;
  const OtsuSplit at = otsu_split(hist, static_cast<int>(std::floor(result.theta * 255.0 + 1e-9)));
  result.sigma_in = at.sigma_in;
  result.sigma_out = at.sigma_out;
  result.total_variance = otsu_split(hist, 255).sigma_in;
  return result;
}

BinaryImage binarize(const GrayImage& img, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) fail(ErrorKind::kParameter, "threshold outside [0, 1]");
  std::vector<std::uint8_t> bits(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) bits[i] = img[i] <= theta ? 0 : 1;
  return BinaryImage(img.width(), img.height(), std::move(bits));
}

PixelGraph build_pixel_graph(const GrayImage& img) {
  if (img.size() < 2) fail(ErrorKind::kParameter, "pixel graph needs at least two pixels");
  PixelGraph graph;
  graph.width = img.width();
  graph.height = img.height();

  double mean = 0.0;
  for (double v : img.values()) mean += v;
  mean /= static_cast<double>(img.size());
  double var = 0.0;
  for (double v : img.values()) var += (v - mean) * (v - mean);
  var /= static_cast<double>(img.size());
  graph.sigma = std::max(var, 1e-6);

  graph.degree.assign(img.size(), 0.0);
  auto connect = [&](int i, int j) {
    const double d = img[static_cast<std::size_t>(i)] - img[static_cast<std::size_t>(j)];
    const double wgt = std::exp(-d * d / graph.sigma);
    graph.edges.push_back({i, j, wgt});
    graph.degree[static_cast<std::size_t>(i)] += wgt;
    graph.degree[static_cast<std::size_t>(j)] += wgt;
  };
  for (int y = 0; y < graph.height; ++y) {
    for (int x = 0; x < graph.width; ++x) {
      const int i = y * graph.width + x;
      if (x + 1 < graph.width) connect(i, i + 1);
      if (y + 1 < graph.height) connect(i, i + graph.width);
    }
  }
  return graph;
}

Eigen::SparseMatrix<double> PixelGraph::laplacian() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(edges.size() * 2 + degree.size());
  for (std::size_t i = 0; i < degree.size(); ++i) {
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), degree[i]);
  }
  for (const auto& e : edges) {
    triplets.emplace_back(e.i, e.j, -e.weight);
    triplets.emplace_back(e.j, e.i, -e.weight);
  }
  Eigen::SparseMatrix<double> m(vertex_count(), vertex_count());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

Segmentation random_walker_segment(const GrayImage& img, const std::vector<SeedSet>& seeds) {
  if (seeds.size() < 2) fail(ErrorKind::kParameter, "random walker needs at least two seed sets");
  const int n = static_cast<int>(img.size());
  const int shapes = static_cast<int>(seeds.size());

  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  for (int j = 0; j < shapes; ++j) {
    if (seeds[static_cast<std::size_t>(j)].empty()) fail(ErrorKind::kParameter, "empty seed set");
    for (int p : seeds[static_cast<std::size_t>(j)]) {
      if (p < 0 || p >= n) fail(ErrorKind::kParameter, "seed pixel out of range");
      auto& o = owner[static_cast<std::size_t>(p)];
      if (o != -1 && o != j) fail(ErrorKind::kParameter, "overlapping seed sets");
      o = j;
    }
  }

  const PixelGraph graph = build_pixel_graph(img);

  // Unseeded vertices get compact indices for the reduced system.
  std::vector<int> reduced(static_cast<std::size_t>(n), -1);
  int unseeded = 0;
  for (int p = 0; p < n; ++p) {
    if (owner[static_cast<std::size_t>(p)] == -1) reduced[static_cast<std::size_t>(p)] = unseeded++;
  }

  Segmentation seg;
  seg.width = img.width();
  seg.height = img.height();
  seg.shape_count = shapes;
  seg.probabilities.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(shapes), 0.0);
  for (int p = 0; p < n; ++p) {
    const int o = owner[static_cast<std::size_t>(p)];
    if (o != -1) seg.probabilities[static_cast<std::size_t>(p) * shapes + o] = 1.0;
  }

  if (unseeded > 0) {
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(unseeded, shapes);
    for (int p = 0; p < n; ++p) {
      const int r = reduced[static_cast<std::size_t>(p)];
      if (r != -1) triplets.emplace_back(r, r, graph.degree[static_cast<std::size_t>(p)]);
    }
    for (const auto& e : graph.edges) {
      const int ri = reduced[static_cast<std::size_t>(e.i)];
      const int rj = reduced[static_cast<std::size_t>(e.j)];
      if (ri != -1 && rj != -1) {
        triplets.emplace_back(ri, rj, -e.weight);
        triplets.emplace_back(rj, ri, -e.weight);
      } else if (ri != -1) {
        rhs(ri, owner[static_cast<std::size_t>(e.j)]) += e.weight;
      } else if (rj != -1) {
        rhs(rj, owner[static_cast<std::size_t>(e.i)]) += e.weight;
      }
    }
    Eigen::SparseMatrix<double> lu(unseeded, unseeded);
    lu.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(lu);
    if (solver.info() != Eigen::Success || (solver.vectorD().array() <= 1e-300).any()) {
      fail(ErrorKind::kSolver, "reduced Laplacian is singular (unseeded region without a seed path)");
    }
    const Eigen::MatrixXd x = solver.solve(rhs);
    const double residual = (lu * x - rhs).norm();
    if (!x.allFinite() || residual > 1e-8 * std::max(rhs.norm(), 1.0)) {
      fail(ErrorKind::kSolver, "random walker solve did not reach 1e-8 relative residual");
    }
    for (int p = 0; p < n; ++p) {
      const int r = reduced[static_cast<std::size_t>(p)];
      if (r == -1) continue;
      for (int j = 0; j < shapes; ++j) {
        seg.probabilities[static_cast<std::size_t>(p) * shapes + j] = std::clamp(x(r, j), 0.0, 1.0);
      }
    }
  }

  seg.labels.resize(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    int best = 0;
    for (int j = 1; j < shapes; ++j) {
      if (seg.probability(p, j) > seg.probability(p, best)) best = j;
    }
    seg.labels[static_cast<std::size_t>(p)] = best;
  }
  return seg;
}

namespace {

// 4-connected components of pixels whose bit equals `value`, in row-major
// order of their first pixel.
std::vector<std::vector<int>> components(const BinaryImage& bin, std::uint8_t value) {
  const int w = bin.width();
  const int h = bin.height();
  std::vector<char> seen(bin.size(), 0);
  std::vector<std::vector<int>> out;
  for (int start = 0; start < w * h; ++start) {
    if (seen[static_cast<std::size_t>(start)] || bin[static_cast<std::size_t>(start)] != value) continue;
    std::vector<int> comp;
    std::queue<int> frontier;
    frontier.push(start);
    seen[static_cast<std::size_t>(start)] = 1;
    while (!frontier.empty()) {
      const int p = frontier.front();
      frontier.pop();
      comp.push_back(p);
      const int x = p % w;
      const int y = p / w;
      const int nbrs[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (const auto& nb : nbrs) {
        if (nb[0] < 0 || nb[0] >= w || nb[1] < 0 || nb[1] >= h) continue;
        const int q = nb[1] * w + nb[0];
        if (!seen[static_cast<std::size_t>(q)] && bin[static_cast<std::size_t>(q)] == value) {
          seen[static_cast<std::size_t>(q)] = 1;
          frontier.push(q);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace

std::vector<SeedSet> DerivedSeeds::all() const {
  std::vector<SeedSet> out = foreground;
  out.push_back(background);
  return out;
}

DerivedSeeds derive_seeds(const BinaryImage& bin) {
  if (bin.foreground_count() == 0) fail(ErrorKind::kDegenerate, "empty foreground: nothing to segment");
  const int w = bin.width();
  DerivedSeeds seeds;
  for (const auto& comp : components(bin, 1)) {
    double cx = 0.0, cy = 0.0;
    for (int p : comp) {
      cx += p % w;
      cy += p / w;
    }
    cx /= static_cast<double>(comp.size());
    cy /= static_cast<double>(comp.size());
    int best = comp.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (int p : comp) {  // comp is sorted, so ties keep the lowest index
      const double dx = p % w - cx;
      const double dy = p / w - cy;
      const double d = dx * dx + dy * dy;
      if (d < best_d - 1e-12) {
        best_d = d;
        best = p;
      }
    }
    seeds.foreground.push_back({best});
  }
  const auto background = components(bin, 0);
  if (background.empty()) fail(ErrorKind::kParameter, "background seed set is empty (all-foreground image)");
  const auto largest = std::max_element(background.begin(), background.end(),
                                        [](const auto& a, const auto& b) { return a.size() < b.size(); });
  seeds.background = *largest;
  return seeds;
}

std::vector<ShapeCrop> crop_shapes(const GrayImage& img, const Segmentation& seg, const std::vector<int>& shapes) {
  std::vector<ShapeCrop> out;
  for (int shape : shapes) {
    int x0 = img.width(), y0 = img.height(), x1 = -1, y1 = -1;
    std::size_t count = 0;
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        if (seg.labels[img.index(x, y)] != shape) continue;
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
        ++count;
      }
    }
    if (count == 0) continue;
    ShapeCrop crop;
    crop.shape = shape;
    crop.box = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
    crop.pixel_count = count;
    GrayImage cut(crop.box.width, crop.box.height, 0.0);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (seg.labels[img.index(x, y)] == shape) cut.set(x - x0, y - y0, img.at(x, y));
      }
    }
    crop.image = std::move(cut);
    out.push_back(std::move(crop));
  }
  return out;
}

PreprocessResult preprocess(const GrayImage& img, const PreprocessConfig& config) {
  PreprocessResult r;
  r.filtered = median_filter(img, MedianWindow(config.median_side));
  r.otsu = otsu_threshold(r.filtered);
  r.binary = binarize(r.filtered, r.otsu.theta);
  r.seeds = derive_seeds(r.binary);
  r.segmentation = random_walker_segment(r.filtered, r.seeds.all());
  std::vector<int> foreground(r.seeds.foreground.size());
  for (std::size_t j = 0; j < foreground.size(); ++j) foreground[j] = static_cast<int>(j);
  r.shapes = crop_shapes(r.filtered, r.segmentation, foreground);
  std::stable_sort(r.shapes.begin(), r.shapes.end(),
                   [](const ShapeCrop& a, const ShapeCrop& b) { return a.pixel_count > b.pixel_count; });
  return r;
}

}  // namespace finspect
