#include "finspect/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "finspect/error.hpp"

namespace finspect {
namespace {

void check_dimensions(int width, int height, std::size_t count, const char* what) {
  if (width < 0 || height < 0) fail(ErrorKind::kShape, std::string(what) + ": negative dimensions");
  if (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) != count) {
    fail(ErrorKind::kShape, std::string(what) + ": pixel count does not match width x height");
  }
}

// Netpbm header/ASCII tokenizer that tracks the byte offset for error messages.
class NetpbmReader {
 public:
  explicit NetpbmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::kDecode, what + " at byte offset " + std::to_string(pos_));
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string magic() {
    if (bytes_.size() < 2) error("truncated magic number");
    std::string m{static_cast<char>(bytes_[0]), static_cast<char>(bytes_[1])};
    pos_ = 2;
    return m;
  }

  long integer(const char* field) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) error(std::string("truncated header, expected ") + field);
    if (!std::isdigit(bytes_[pos_])) error(std::string("expected decimal ") + field);
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000L) error(std::string(field) + " is too large");
      ++pos_;
    }
    if (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') {
      error(std::string("malformed ") + field);
    }
    return v;
  }

  // After maxval, binary formats carry exactly one whitespace byte.
  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) error("expected whitespace before raster");
    ++pos_;
  }

  std::span<const std::uint8_t> raw(std::size_t count) {
    if (bytes_.size() - pos_ < count) {
      error("truncated payload: need " + std::to_string(count) + " bytes, have " +
            std::to_string(bytes_.size() - pos_));
    }
    auto out = bytes_.subspan(pos_, count);
    pos_ += count;
    return out;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_samples(NetpbmReader& rd, bool binary, std::size_t count) {
  std::vector<std::uint8_t> out(count);
  if (binary) {
    rd.single_whitespace();
    auto raw = rd.raw(count);
    std::copy(raw.begin(), raw.end(), out.begin());
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const long v = rd.integer("sample");
    if (v > 255) rd.error("sample exceeds maxval 255");
    out[i] = static_cast<std::uint8_t>(v);
  }
  return out;
}

}  // namespace

RgbImage::RgbImage(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dimensions(width, height, pixels_.size(), "RgbImage");
}

GrayImage::GrayImage(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  check_dimensions(width, height, values_.size(), "GrayImage");
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorKind::kData, "GrayImage intensity outside [0, 1]");
  }
}

GrayImage::GrayImage(int width, int height, double fill)
    : GrayImage(width, height,
                std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                        static_cast<std::size_t>(std::max(height, 0)),
                                    fill)) {}

void GrayImage::set(int x, int y, double v) {
  if (!(v >= 0.0 && v <= 1.0)) fail(ErrorKind::kData, "GrayImage intensity outside [0, 1]");
  values_[index(x, y)] = v;
}

BinaryImage::BinaryImage(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  check_dimensions(width, height, bits_.size(), "BinaryImage");
  for (auto b : bits_) {
    if (b > 1) fail(ErrorKind::kData, "BinaryImage bit outside {0, 1}");
  }
}

std::size_t BinaryImage::foreground_count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

void GrayscaleCoefficients::validate() const {
  for (double c : {alpha, beta, gamma}) {
    if (!(c >= 0.0 && c <= 1.0)) fail(ErrorKind::kConfiguration, "grayscale coefficient outside [0, 1]");
  }
  if (std::abs(alpha + beta + gamma - 1.0) > 1e-9) {
    fail(ErrorKind::kConfiguration, "grayscale coefficients must sum to 1");
  }
  if (mu != 1 && mu != 255) fail(ErrorKind::kConfiguration, "grayscale mu must be 1 or 255");
}

DecodedImage decode_image(std::span<const std::uint8_t> bytes) {
  NetpbmReader rd(bytes);
  const std::string magic = rd.magic();
  if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6") {
    fail(ErrorKind::kDecode, "unsupported magic '" + magic + "' at byte offset 0");
  }
  const bool color = magic == "P3" || magic == "P6";
  const bool binary = magic == "P5" || magic == "P6";

  const long width = rd.integer("width");
  const long height = rd.integer("height");
  const std::size_t maxval_offset = rd.offset();
  const long maxval = rd.integer("maxval");
  if (maxval != 255) {
    fail(ErrorKind::kDecode, "maxval " + std::to_string(maxval) + " is not 255 at byte offset " +
                                 std::to_string(maxval_offset));
  }
  if (width <= 0 || height <= 0) rd.error("image dimensions must be positive");

  const std::size_t pixels = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const auto samples = read_samples(rd, binary, pixels * (color ? 3 : 1));

  if (color) {
    std::vector<Rgb> px(pixels);
    for (std::size_t i = 0; i < pixels; ++i) px[i] = {samples[3 * i], samples[3 * i + 1], samples[3 * i + 2]};
    return RgbImage(static_cast<int>(width), static_cast<int>(height), std::move(px));
  }
  std::vector<double> values(pixels);
  for (std::size_t i = 0; i < pixels; ++i) values[i] = samples[i] / 255.0;
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(values));
}

DecodedImage decode_image(std::string_view bytes) {
  return decode_image(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()),
                                                    bytes.size()));
}

std::string encode_pgm(const GrayImage& img) {
  std::ostringstream out;
  out << "P2\n" << img.width() << ' ' << img.height() << "\n255\n";
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (x > 0) out << ' ';
      out << static_cast<int>(std::lround(img.at(x, y) * 255.0));
    }
    out << '\n';
  }
  return out.str();
}

GrayImage to_grayscale(const RgbImage& img, const GrayscaleCoefficients& coeff) {
  coeff.validate();
  // With mu = 1 the value lands in [0, 255]; both paths end up on [0, 1].
  const double rescale = coeff.mu == 1 ? 1.0 / 255.0 : 1.0;
  std::vector<double> values;
  values.reserve(img.pixels().size());
  for (const Rgb& p : img.pixels()) {
    const double f = (coeff.alpha * p.r + coeff.beta * p.g + coeff.gamma * p.b) / coeff.mu * rescale;
    values.push_back(std::clamp(f, 0.0, 1.0));
  }
  return GrayImage(img.width(), img.height(), std::move(values));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kData, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kData, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

GrayImage load_gray(const std::filesystem::path& path, const GrayscaleCoefficients& coeff) {
  const std::string bytes = read_file(path);
  auto decoded = decode_image(std::string_view(bytes));
  if (auto* rgb = std::get_if<RgbImage>(&decoded)) return to_grayscale(*rgb, coeff);
  return std::get<GrayImage>(std::move(decoded));
}

}  // namespace finspect
