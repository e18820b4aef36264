#include "finspect/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "finspect/error.hpp"

namespace finspect {

namespace {

constexpr std::array<std::pair<ShapeKind, std::string_view>, 4> kNames{{
    {ShapeKind::kEllipse, "ellipse"},
    {ShapeKind::kTriangle, "triangle"},
    {ShapeKind::kFinPolygon, "fin-polygon"},
    {ShapeKind::kDisk, "disk"},
}};

using Polygon = std::vector<std::pair<double, double>>;

bool inside(const Polygon& poly, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto [xi, yi] = poly[i];
    const auto [xj, yj] = poly[j];
    if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
  }
  return in;
}

Polygon outline(ShapeKind kind, double s) {
  if (kind == ShapeKind::kTriangle) return {{-s, s}, {s, s}, {-0.3 * s, -s}};
  // Swept dorsal fin: flat base, raked leading edge, concave trailing edge.
  return {{-s, s}, {s, s}, {0.35 * s, 0.3 * s}, {0.15 * s, -s}, {-0.45 * s, 0.1 * s}};
}

}  // namespace

std::string_view to_string(ShapeKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ShapeKind shape_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  fail(ErrorKind::kConfiguration, "unknown shape kind '" + std::string(name) + "'");
}

std::string_view default_label(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::kFinPolygon: return "mature_shark";
    case ShapeKind::kEllipse: return "shark_school";
    case ShapeKind::kTriangle: return "baby_shark";
    case ShapeKind::kDisk: return "other";
  }
  return "other";
}

void SyntheticShapeSpec::validate() const {
  if (size < 0) fail(ErrorKind::kSpecification, "shape size must be non-negative");
  if (!(transform.scale > 0.0) || !std::isfinite(transform.scale)) {
    fail(ErrorKind::kSpecification, "scale factor must be positive");
  }
  if (!(intensity > 0.0 && intensity <= 1.0)) fail(ErrorKind::kSpecification, "intensity must be in (0, 1]");
  if (!(noise >= 0.0)) fail(ErrorKind::kSpecification, "noise level must be non-negative");
  if (canvas_width < 1 || canvas_height < 1) fail(ErrorKind::kSpecification, "canvas must be non-empty");
}

BinaryImage shape_mask(ShapeKind kind, int size) {
  if (size < 0) fail(ErrorKind::kSpecification, "shape size must be non-negative");
  const int side = 2 * size + 1;
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(side) * side, 0);
  const double s = size;
  Polygon poly;
  if (kind == ShapeKind::kTriangle || kind == ShapeKind::kFinPolygon) poly = outline(kind, s + 0.5);
  for (int y = -size; y <= size; ++y) {
    for (int x = -size; x <= size; ++x) {
      bool on = false;
      switch (kind) {
        case ShapeKind::kDisk:
          on = x * x + y * y <= size * size;
          break;
        case ShapeKind::kEllipse: {
          const double a = s + 0.5;
          const double b = 0.5 * s + 0.5;
          on = (x / a) * (x / a) + (y / b) * (y / b) <= 1.0;
          break;
        }
        default:
          on = size == 0 || inside(poly, x, y);
      }
      bits[static_cast<std::size_t>(y + size) * side + static_cast<std::size_t>(x + size)] = on ? 1 : 0;
    }
  }
  return BinaryImage(side, side, std::move(bits));
}

BinaryImage rotate_quarter(const BinaryImage& mask, int quarter_turns) {
  const int turns = ((quarter_turns % 4) + 4) % 4;
  BinaryImage cur = mask;
  for (int t = 0; t < turns; ++t) {
    const int w = cur.width();
    const int h = cur.height();
    std::vector<std::uint8_t> bits(cur.size());
    // new(x, y) = old(y, h - 1 - x); new width h, new height w.
    for (int y = 0; y < w; ++y) {
      for (int x = 0; x < h; ++x) bits[static_cast<std::size_t>(y) * h + x] = cur.at(y, h - 1 - x);
    }
    cur = BinaryImage(h, w, std::move(bits));
  }
  return cur;
}

BinaryImage scale_nearest(const BinaryImage& mask, double factor) {
  if (!(factor > 0.0)) fail(ErrorKind::kSpecification, "scale factor must be positive");
  const int w = std::max(1, static_cast<int>(std::lround(mask.width() * factor)));
  const int h = std::max(1, static_cast<int>(std::lround(mask.height() * factor)));
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const int sy = std::min(mask.height() - 1, static_cast<int>(std::floor(y / factor)));
    for (int x = 0; x < w; ++x) {
      const int sx = std::min(mask.width() - 1, static_cast<int>(std::floor(x / factor)));
      bits[static_cast<std::size_t>(y) * w + x] = mask.at(sx, sy);
    }
  }
  return BinaryImage(w, h, std::move(bits));
}

namespace {

void stamp(std::vector<double>& canvas, int width, int height, const SyntheticShapeSpec& spec) {
  spec.validate();
  BinaryImage mask = shape_mask(spec.kind, spec.size);
  if (spec.transform.scale != 1.0) mask = scale_nearest(mask, spec.transform.scale);
  mask = rotate_quarter(mask, spec.transform.quarter_turns);
  const int left = width / 2 - mask.width() / 2 + spec.transform.dx;
  const int top = height / 2 - mask.height() / 2 + spec.transform.dy;
  if (left < 0 || top < 0 || left + mask.width() > width || top + mask.height() > height) {
    fail(ErrorKind::kSpecification, "transformed " + std::string(to_string(spec.kind)) + " leaves the " +
                                        std::to_string(width) + "x" + std::to_string(height) + " canvas");
  }
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y)) canvas[static_cast<std::size_t>(top + y) * width + (left + x)] = spec.intensity;
    }
  }
}

void add_noise(std::vector<double>& canvas, double sigma, std::uint64_t seed) {
  if (sigma <= 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (double& v : canvas) v = std::clamp(v + gauss(rng), 0.0, 1.0);
}

}  // namespace

GrayImage generate_synthetic(const SyntheticShapeSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::vector<double> canvas(static_cast<std::size_t>(spec.canvas_width) * spec.canvas_height, 0.0);
  stamp(canvas, spec.canvas_width, spec.canvas_height, spec);
  add_noise(canvas, spec.noise, seed);
  return GrayImage(spec.canvas_width, spec.canvas_height, std::move(canvas));
}

GrayImage generate_scene(int width, int height, std::span<const SyntheticShapeSpec> shapes, double noise,
                         std::uint64_t seed) {
  if (width < 1 || height < 1) fail(ErrorKind::kSpecification, "canvas must be non-empty");
  if (!(noise >= 0.0)) fail(ErrorKind::kSpecification, "noise level must be non-negative");
  std::vector<double> canvas(static_cast<std::size_t>(width) * height, 0.0);
  for (const auto& spec : shapes) stamp(canvas, width, height, spec);
  add_noise(canvas, noise, seed);
  return GrayImage(width, height, std::move(canvas));
}

GrayImage pad_image(const GrayImage& img, int left, int top, int right, int bottom) {
  if (left < 0 || top < 0 || right < 0 || bottom < 0) fail(ErrorKind::kParameter, "padding must be non-negative");
  const int w = img.width() + left + right;
  const int h = img.height() + top + bottom;
  GrayImage out(w, h, 0.0);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.set(x + left, y + top, img.at(x, y));
  }
  return out;
}

}  // namespace finspect
