#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "finspect/raster.hpp"

namespace finspect {

enum class ShapeKind { kEllipse, kTriangle, kFinPolygon, kDisk };

std::string_view to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(std::string_view name);

// Fixed shape-to-class mapping used by generated manifests.
std::string_view default_label(ShapeKind kind);

// Applied in the order scale, rotate, translate.
struct ShapeTransform {
  int dx = 0;
  int dy = 0;
  int quarter_turns = 0;  // clockwise multiples of 90 degrees
  double scale = 1.0;     // nearest-neighbour; 2.0 replicates each pixel 2x2
};

struct SyntheticShapeSpec {
  ShapeKind kind = ShapeKind::kDisk;
  int size = 8;  // radius / half-extent in pixels
  ShapeTransform transform;
  double intensity = 1.0;
  double noise = 0.0;  // Gaussian sigma, result clamped to [0, 1]
  int canvas_width = 64;
  int canvas_height = 64;

  void validate() const;
};

// Untransformed shape on a (2 size + 1)^2 grid, pixel centres at integer
// offsets from the middle pixel.
BinaryImage shape_mask(ShapeKind kind, int size);

BinaryImage rotate_quarter(const BinaryImage& mask, int quarter_turns);
BinaryImage scale_nearest(const BinaryImage& mask, double factor);

// Places the transformed mask centred on the canvas (shifted by dx, dy).
// Throws kSpecification if any part of the mask leaves the canvas.
GrayImage generate_synthetic(const SyntheticShapeSpec& spec, std::uint64_t seed);

// Several shapes on one canvas; each spec's own canvas size and noise are
// ignored in favour of the scene's.
GrayImage generate_scene(int width, int height, std::span<const SyntheticShapeSpec> shapes, double noise,
                         std::uint64_t seed);

// Grows the canvas with zero borders, moving the content by (left, top).
GrayImage pad_image(const GrayImage& img, int left, int top, int right, int bottom);

}  // namespace finspect
