#include <numeric>

#include <gtest/gtest.h>

#include "finspect/preprocess.hpp"
#include "finspect/synthetic.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace finspect;
using testing_support::random_image;
using testing_support::to_vector;

TEST(Median, MatchesSortOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GrayImage img = random_image(7, 5, seed);
    for (int side : {1, 3, 5}) {
      const GrayImage out = median_filter(img, MedianWindow(side));
      EXPECT_EQ(to_vector(out), oracle::median_filter(to_vector(img), 7, 5, side)) << "side " << side;
    }
  }
}

TEST(Median, RemovesIsolatedImpulse) {
  GrayImage img(5, 5, 0.2);
  img.set(2, 2, 1.0);
  EXPECT_DOUBLE_EQ(median_filter(img, MedianWindow(3)).at(2, 2), 0.2);
}

TEST(Median, RejectsEvenOrOversizedWindows) {
  EXPECT_FINSPECT_ERROR(MedianWindow(4), ErrorKind::kParameter);
  EXPECT_FINSPECT_ERROR(median_filter(GrayImage(2, 2, 0.0), MedianWindow(3)), ErrorKind::kParameter);
}

TEST(Otsu, MatchesExhaustiveSearch) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const GrayImage img = random_image(9, 8, seed + 100);
    EXPECT_NEAR(otsu_threshold(img).theta, oracle::otsu_theta(to_vector(img)), 1e-12) << "seed " << seed;
  }
}

TEST(Otsu, VariancesDecomposeTotal) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const OtsuResult r = otsu_threshold(random_image(6, 6, seed));
    EXPECT_NEAR(r.sigma_in + r.sigma_out, r.total_variance, 1e-9);
  }
}

TEST(Otsu, TwoLevelImageSplitsBetweenLevels) {
  std::vector<double> v(20, 0.2);
  std::fill(v.begin() + 10, v.end(), 0.8);
  const GrayImage img(5, 4, v);
  const OtsuResult r = otsu_threshold(img);
  // Every split between the two levels is optimal; the average is the midpoint
  // of the admissible theta values.
  const double lo = std::lround(0.2 * 255) / 255.0;
  const double hi = (std::lround(0.8 * 255) - 1) / 255.0;
  EXPECT_NEAR(r.theta, 0.5 * (lo + hi), 1e-12);
  const BinaryImage bin = binarize(img, r.theta);
  EXPECT_EQ(bin.foreground_count(), 10u);
}

TEST(Otsu, SingleValuedHistogramIsDegenerate) {
  EXPECT_FINSPECT_ERROR(otsu_threshold(GrayImage(3, 3, 0.5)), ErrorKind::kDegenerate);
}

TEST(Binarize, ThresholdIsInclusiveBackground) {
  const GrayImage img(3, 1, {0.2, 0.5, 0.7});
  const BinaryImage b = binarize(img, 0.5);
  EXPECT_EQ(b.at(0, 0), 0);
  EXPECT_EQ(b.at(1, 0), 0);
  EXPECT_EQ(b.at(2, 0), 1);
  EXPECT_FINSPECT_ERROR(binarize(img, 1.5), ErrorKind::kParameter);
}

TEST(PixelGraph, WeightsFollowGaussianOfDifference) {
  const GrayImage img(2, 1, {0.0, 1.0});
  const PixelGraph g = build_pixel_graph(img);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_NEAR(g.sigma, 0.25, 1e-15);
  EXPECT_NEAR(g.edges[0].weight, std::exp(-4.0), 1e-15);
  const Eigen::MatrixXd lap = Eigen::MatrixXd(g.laplacian());
  EXPECT_NEAR(lap.rowwise().sum().cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(PixelGraph, ConstantImageUsesVarianceFloor) {
  const PixelGraph g = build_pixel_graph(GrayImage(3, 3, 0.4));
  EXPECT_DOUBLE_EQ(g.sigma, 1e-6);
  EXPECT_EQ(g.edges.size(), 12u);
  for (const auto& e : g.edges) EXPECT_DOUBLE_EQ(e.weight, 1.0);
}

namespace {

void expect_matches_oracle(const GrayImage& img, const std::vector<SeedSet>& seeds) {
  const Segmentation seg = random_walker_segment(img, seeds);
  const auto want = oracle::random_walker(to_vector(img), img.width(), img.height(), seeds);
  for (int p = 0; p < static_cast<int>(img.size()); ++p) {
    double sum = 0.0;
    for (int j = 0; j < seg.shape_count; ++j) {
      EXPECT_NEAR(seg.probability(p, j), want[p][j], 1e-8) << "pixel " << p << " set " << j;
      sum += seg.probability(p, j);
    }
    EXPECT_NEAR(sum, 1.0, 1e-6);
  }
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    for (int p : seeds[j]) EXPECT_EQ(seg.probability(p, static_cast<int>(j)), 1.0);
  }
}

}  // namespace

TEST(RandomWalker, TwoByTwoMatchesDenseSolve) {
  expect_matches_oracle(GrayImage(2, 2, {0.1, 0.3, 0.7, 0.9}), {{0}, {3}});
}

TEST(RandomWalker, ThreeByThreeMatchesDenseSolve) {
  expect_matches_oracle(GrayImage(3, 3, {0.9, 0.8, 0.1, 0.85, 0.5, 0.2, 0.7, 0.1, 0.0}), {{0}, {8}});
  expect_matches_oracle(random_image(3, 3, 7), {{0, 1}, {4}, {8}});
}

TEST(RandomWalker, RandomGridsMatchDenseSolve) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) expect_matches_oracle(random_image(6, 5, seed), {{2}, {27}, {14, 15}});
}

TEST(RandomWalker, RejectsBadSeeds) {
  const GrayImage img = random_image(3, 3, 1);
  EXPECT_FINSPECT_ERROR(random_walker_segment(img, {{0}}), ErrorKind::kParameter);
  EXPECT_FINSPECT_ERROR(random_walker_segment(img, {{0}, {}}), ErrorKind::kParameter);
  EXPECT_FINSPECT_ERROR(random_walker_segment(img, {{0}, {0}}), ErrorKind::kParameter);
  EXPECT_FINSPECT_ERROR(random_walker_segment(img, {{0}, {9}}), ErrorKind::kParameter);
}

TEST(RandomWalker, FullySeededImageIsExact) {
  const Segmentation seg = random_walker_segment(GrayImage(2, 1, {0.0, 1.0}), {{0}, {1}});
  EXPECT_EQ(seg.labels, (std::vector<int>{0, 1}));
}

TEST(DeriveSeeds, OneSeedPerComponentNearItsCentroid) {
  // Two 3x3 blocks on a 9x5 background.
  std::vector<std::uint8_t> bits(45, 0);
  for (int y = 1; y <= 3; ++y) {
    for (int x = 1; x <= 3; ++x) bits[y * 9 + x] = 1;
    for (int x = 5; x <= 7; ++x) bits[y * 9 + x] = 1;
  }
  const DerivedSeeds s = derive_seeds(BinaryImage(9, 5, bits));
  ASSERT_EQ(s.foreground.size(), 2u);
  EXPECT_EQ(s.foreground[0], SeedSet{2 * 9 + 2});
  EXPECT_EQ(s.foreground[1], SeedSet{2 * 9 + 6});
  EXPECT_EQ(s.background.size(), 45u - 18u);
  EXPECT_EQ(s.all().size(), 3u);
}

TEST(DeriveSeeds, EmptyForegroundIsDegenerate) {
  EXPECT_FINSPECT_ERROR(derive_seeds(BinaryImage(2, 2, {0, 0, 0, 0})), ErrorKind::kDegenerate);
  EXPECT_FINSPECT_ERROR(derive_seeds(BinaryImage(2, 2, {1, 1, 1, 1})), ErrorKind::kParameter);
}

TEST(Preprocess, SegmentsTwoSeparatedShapes) {
  SyntheticShapeSpec big;
  big.kind = ShapeKind::kDisk;
  big.size = 8;
  big.transform.dx = -14;
  SyntheticShapeSpec small;
  small.kind = ShapeKind::kTriangle;
  small.size = 5;
  small.transform.dx = 16;
  const std::vector<SyntheticShapeSpec> shapes{big, small};
  const GrayImage scene = generate_scene(64, 48, shapes, 0.02, 3);
  const PreprocessResult r = preprocess(scene, {});
  ASSERT_EQ(r.shapes.size(), 2u);
  EXPECT_GT(r.shapes[0].pixel_count, r.shapes[1].pixel_count);
  // The disk has area close to pi * 8^2.
  EXPECT_NEAR(static_cast<double>(r.shapes[0].pixel_count), 3.14159 * 64, 30.0);
  EXPECT_LE(r.shapes[0].box.width, 19);
}

TEST(CropShapes, KeepsOnlyTheShapePixels) {
  Segmentation seg;
  seg.width = 3;
  seg.height = 2;
  seg.shape_count = 2;
  seg.labels = {1, 0, 0, 1, 0, 1};
  const GrayImage img(3, 2, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  const auto crops = crop_shapes(img, seg, {0, 1});
  ASSERT_EQ(crops.size(), 2u);
  EXPECT_EQ(crops[0].box.x, 1);
  EXPECT_EQ(crops[0].box.width, 2);
  EXPECT_EQ(crops[0].pixel_count, 3u);
  EXPECT_DOUBLE_EQ(crops[0].image.at(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(crops[0].image.at(1, 0), 0.3);
  EXPECT_EQ(crops[1].box.width, 3);
}
