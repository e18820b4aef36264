#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace finspect {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
};

class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, std::vector<Rgb> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
  std::span<const Rgb> pixels() const noexcept { return pixels_; }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> pixels_;
};

// Row-major intensities f(x, y) in [0, 1]; x is the column, y the row.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::vector<double> values);
  GrayImage(int width, int height, double fill = 0.0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double at(int x, int y) const { return values_[index(x, y)]; }
  void set(int x, int y, double v);
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

// h(x, y) in {0, 1}: 0 is background, 1 is foreground.
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(int width, int height, std::vector<std::uint8_t> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }
  std::uint8_t at(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)];
  }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::size_t foreground_count() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// f = (alpha*i + beta*j + gamma*k) / mu. Both mu = 1 and mu = 255 are accepted;
// results are always rescaled onto [0, 1].
struct GrayscaleCoefficients {
  double alpha = 0.299;
  double beta = 0.587;
  double gamma = 0.114;
  int mu = 255;

  void validate() const;
};

using DecodedImage = std::variant<RgbImage, GrayImage>;

DecodedImage decode_image(std::span<const std::uint8_t> bytes);
DecodedImage decode_image(std::string_view bytes);

// Plain (P2) PGM with maxval 255; samples are round(f * 255).
std::string encode_pgm(const GrayImage& img);

GrayImage to_grayscale(const RgbImage& img, const GrayscaleCoefficients& coeff = {});

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Reads a PGM or PPM from disk, converting colour images with `coeff`.
GrayImage load_gray(const std::filesystem::path& path, const GrayscaleCoefficients& coeff = {});

}  // namespace finspect
