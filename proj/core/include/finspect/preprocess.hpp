#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/SparseCore>

#include "finspect/raster.hpp"

namespace finspect {

// Square median window; side must be odd so the median is an existing pixel.
class MedianWindow {
 public:
  explicit MedianWindow(int side = 3);
  int side() const noexcept { return side_; }

 private:
  int side_;
};

// Replicate-edge borders; output has the input's dimensions.
GrayImage median_filter(const GrayImage& img, MedianWindow window);

// 256 bins over [0, 1]; bin p holds intensities that round to p / 255.
struct Histogram {
  std::array<std::size_t, 256> counts{};
  std::size_t total = 0;

  static Histogram of(const GrayImage& img);
  static int bin_of(double intensity);
  double probability(int bin) const { return static_cast<double>(counts[static_cast<std::size_t>(bin)]) / total; }
};

struct OtsuResult {
  double theta = 0.0;
  double sigma_in = 0.0;   // intraclass variance at theta
  double sigma_out = 0.0;  // interclass variance at theta
  double total_variance = 0.0;
};

// Class statistics for the split "bins <= last_background_bin" vs the rest.
struct OtsuSplit {
  double w_background = 0.0;
  double w_foreground = 0.0;
  double mean_background = 0.0;
  double mean_foreground = 0.0;
  double sigma_in = 0.0;
  double sigma_out = 0.0;
};
OtsuSplit otsu_split(const Histogram& hist, int last_background_bin);

// Maximizes the interclass variance over all splits of the 256-bin
// histogram; tied optimal thresholds are averaged. Throws kDegenerate when
// fewer than two bins are occupied.
OtsuResult otsu_threshold(const GrayImage& img);

// h = 0 where g <= theta, 1 elsewhere.
BinaryImage binarize(const GrayImage& img, double theta);

struct WeightedEdge {
  int i = 0;
  int j = 0;
  double weight = 0.0;
};

// 4-neighbourhood graph with Gaussian weights exp(-(g_i - g_j)^2 / sigma).
struct PixelGraph {
  int width = 0;
  int height = 0;
  double sigma = 0.0;
  std::vector<WeightedEdge> edges;
  std::vector<double> degree;

  int vertex_count() const noexcept { return width * height; }
  Eigen::SparseMatrix<double> laplacian() const;
};

PixelGraph build_pixel_graph(const GrayImage& img);

using SeedSet = std::vector<int>;  // row-major pixel indices

struct Segmentation {
  int width = 0;
  int height = 0;
  int shape_count = 0;
  std::vector<double> probabilities;  // pixel-major: probabilities[p * shape_count + j]
  std::vector<int> labels;            // argmax, ties to the lower shape index

  double probability(int pixel, int shape) const {
    return probabilities[static_cast<std::size_t>(pixel) * static_cast<std::size_t>(shape_count) +
                         static_cast<std::size_t>(shape)];
  }
};

Segmentation random_walker_segment(const GrayImage& img, const std::vector<SeedSet>& seeds);

struct DerivedSeeds {
  std::vector<SeedSet> foreground;  // one single-pixel set per component
  SeedSet background;               // the largest background component

  // Foreground sets first, background last.
  std::vector<SeedSet> all() const;
};

DerivedSeeds derive_seeds(const BinaryImage& bin);

struct BoundingBox {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

struct ShapeCrop {
  int shape = 0;
  BoundingBox box;
  std::size_t pixel_count = 0;
  GrayImage image;  // intensities of the shape's pixels, zero elsewhere
};

// Crops every shape in `shapes` to its bounding box. Shapes that own no
// pixels are skipped.
std::vector<ShapeCrop> crop_shapes(const GrayImage& img, const Segmentation& seg, const std::vector<int>& shapes);

struct PreprocessConfig {
  GrayscaleCoefficients grayscale;
  int median_side = 3;
};

struct PreprocessResult {
  GrayImage filtered;
  OtsuResult otsu;
  BinaryImage binary;
  DerivedSeeds seeds;
  Segmentation segmentation;
  std::vector<ShapeCrop> shapes;  // foreground shapes only, largest first
};

// median filter -> Otsu -> seeds -> random walker -> per-shape crops.
PreprocessResult preprocess(const GrayImage& img, const PreprocessConfig& config);

}  // namespace finspect
