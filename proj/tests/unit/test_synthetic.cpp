#include <gtest/gtest.h>

#include "finspect/synthetic.hpp"
#include "test_support.hpp"

using namespace finspect;

TEST(ShapeMask, DiskAreaAndSymmetry) {
  const BinaryImage m = shape_mask(ShapeKind::kDisk, 10);
  EXPECT_EQ(m.width(), 21);
  EXPECT_NEAR(static_cast<double>(m.foreground_count()), 3.14159 * 100, 15.0);
  for (int y = 0; y < 21; ++y) {
    for (int x = 0; x < 21; ++x) EXPECT_EQ(m.at(x, y), m.at(20 - x, y));
  }
}

TEST(ShapeMask, EveryKindIsNonEmptyAndDistinct) {
  std::vector<std::size_t> counts;
  for (ShapeKind k : {ShapeKind::kEllipse, ShapeKind::kTriangle, ShapeKind::kFinPolygon, ShapeKind::kDisk}) {
    const BinaryImage m = shape_mask(k, 8);
    EXPECT_GT(m.foreground_count(), 20u) << to_string(k);
    counts.push_back(m.foreground_count());
  }
  std::sort(counts.begin(), counts.end());
  EXPECT_EQ(std::adjacent_find(counts.begin(), counts.end()), counts.end());
  EXPECT_FINSPECT_ERROR(shape_mask(ShapeKind::kDisk, -1), ErrorKind::kSpecification);
}

TEST(RotateQuarter, FourTurnsIsIdentityAndDimensionsSwap) {
  const BinaryImage m = scale_nearest(shape_mask(ShapeKind::kTriangle, 4), 1.5);
  const BinaryImage r1 = rotate_quarter(m, 1);
  EXPECT_EQ(r1.width(), m.height());
  EXPECT_EQ(r1.height(), m.width());
  const BinaryImage r4 = rotate_quarter(m, 4);
  EXPECT_TRUE(std::equal(r4.bits().begin(), r4.bits().end(), m.bits().begin()));
  const BinaryImage back = rotate_quarter(r1, -1);
  EXPECT_TRUE(std::equal(back.bits().begin(), back.bits().end(), m.bits().begin()));
}

TEST(ScaleNearest, DoublingReplicatesPixels) {
  const BinaryImage m(2, 1, {1, 0});
  const BinaryImage s = scale_nearest(m, 2.0);
  EXPECT_EQ(s.width(), 4);
  EXPECT_EQ(s.height(), 2);
  EXPECT_EQ(std::vector<std::uint8_t>(s.bits().begin(), s.bits().end()),
            (std::vector<std::uint8_t>{1, 1, 0, 0, 1, 1, 0, 0}));
  EXPECT_FINSPECT_ERROR(scale_nearest(m, 0.0), ErrorKind::kSpecification);
}

TEST(Generate, TranslationMovesContentExactly) {
  SyntheticShapeSpec spec;
  spec.kind = ShapeKind::kFinPolygon;
  const GrayImage a = generate_synthetic(spec, 0);
  spec.transform.dx = 5;
  spec.transform.dy = -3;
  const GrayImage b = generate_synthetic(spec, 0);
  for (int y = 3; y < 61; ++y) {
    for (int x = 0; x < 59; ++x) EXPECT_EQ(a.at(x, y), b.at(x + 5, y - 3));
  }
}

TEST(Generate, LeavingTheCanvasIsASpecificationError) {
  SyntheticShapeSpec spec;
  spec.size = 10;
  spec.transform.dx = 30;
  EXPECT_FINSPECT_ERROR(generate_synthetic(spec, 0), ErrorKind::kSpecification);
  SyntheticShapeSpec dim;
  dim.intensity = 0.0;
  EXPECT_FINSPECT_ERROR(generate_synthetic(dim, 0), ErrorKind::kSpecification);
}

TEST(Generate, NoiseIsSeededAndClamped) {
  SyntheticShapeSpec spec;
  spec.noise = 0.3;
  const GrayImage a = generate_synthetic(spec, 11);
  EXPECT_EQ(a, generate_synthetic(spec, 11));
  EXPECT_NE(a, generate_synthetic(spec, 12));
  for (double v : a.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Scene, ShapesShareOneCanvas) {
  SyntheticShapeSpec left, right;
  left.size = 4;
  left.transform.dx = -10;
  right.size = 4;
  right.transform.dx = 10;
  const std::vector<SyntheticShapeSpec> shapes{left, right};
  const GrayImage img = generate_scene(40, 20, shapes, 0.0, 0);
  double mass = 0.0;
  for (double v : img.values()) mass += v;
  EXPECT_DOUBLE_EQ(mass, 2.0 * static_cast<double>(shape_mask(ShapeKind::kDisk, 4).foreground_count()));
}

TEST(PadImage, ShiftsContent) {
  const GrayImage img(2, 1, {0.25, 0.5});
  const GrayImage p = pad_image(img, 3, 1, 0, 2);
  EXPECT_EQ(p.width(), 5);
  EXPECT_EQ(p.height(), 4);
  EXPECT_EQ(p.at(3, 1), 0.25);
  EXPECT_EQ(p.at(4, 1), 0.5);
  EXPECT_FINSPECT_ERROR(pad_image(img, -1, 0, 0, 0), ErrorKind::kParameter);
}

TEST(ShapeKindNames, RoundTripAndLabels) {
  for (ShapeKind k : {ShapeKind::kEllipse, ShapeKind::kTriangle, ShapeKind::kFinPolygon, ShapeKind::kDisk}) {
    EXPECT_EQ(shape_kind_from_string(to_string(k)), k);
  }
  EXPECT_EQ(default_label(ShapeKind::kFinPolygon), "mature_shark");
  EXPECT_EQ(default_label(ShapeKind::kDisk), "other");
  EXPECT_FINSPECT_ERROR(shape_kind_from_string("hexagon"), ErrorKind::kConfiguration);
}
