#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finspect/raster.hpp"

namespace finspect {

enum class Extractor { kCmi, kGfd, kElm };

std::string_view to_string(Extractor e);
Extractor extractor_from_string(std::string_view name);

struct FeatureVector {
  Extractor extractor = Extractor::kCmi;
  std::vector<std::string> descriptor;  // meaning of each value, same length
  std::vector<double> values;
};

struct Centroid {
  double x = 0.0;
  double y = 0.0;
};

// Intensity-weighted centroid (mu10 / mu00, mu01 / mu00). Throws kZeroMass.
Centroid centroid(const GrayImage& img);

// kPixelCenter evaluates the integrand at pixel centres; kPixelArea integrates
// it exactly over each pixel's unit square.
enum class MomentRule { kPixelCenter, kPixelArea };

// sum x^a y^b g(x, y), with (x, y) shifted by the centroid when `central`.
double geometric_moment(const GrayImage& img, int a, int b, bool central,
                        MomentRule rule = MomentRule::kPixelCenter);

// Central complex moment C_ab = sum ((x-xc) + i(y-yc))^a ((x-xc) - i(y-yc))^b g,
// integrated exactly over each pixel square.
std::complex<double> complex_moment(const GrayImage& img, int a, int b);

struct MomentTerm {
  int a = 0;
  int b = 0;
  double c = 1.0;  // exponent; may be fractional
};

// One invariant: prod_i C_{a_i b_i}^{c_i} / C_00^{w_i}, w_i = c_i (a_i + b_i + 2) / 2.
struct MomentProductSpec {
  std::vector<MomentTerm> terms;

  // sum c_i (a_i - b_i) == 0
  bool rotation_invariant() const;
  std::string label() const;
};

std::vector<MomentProductSpec> default_cmi_basis();

FeatureVector cmi_features(const GrayImage& img, std::span<const MomentProductSpec> basis);
FeatureVector cmi_features(const GrayImage& img);

struct GfdConfig {
  int radial = 4;
  int angular = 9;
  int radial_samples = 64;
  int angular_samples = 128;
};

// Bilinear polar resampling around the centroid. Sample (m, t) sits at radius
// (m + 0.5) / radial_samples * r_max and angle 2*pi*t / angular_samples.
struct PolarSamples {
  int radial = 0;
  int angular = 0;
  double r_max = 0.0;
  Centroid center;
  std::vector<double> values;  // values[m * angular + t]

  double at(int m, int t) const { return values[static_cast<std::size_t>(m) * angular + t]; }
};

PolarSamples polar_resample(const GrayImage& img, const GfdConfig& config);

// |S(rho, psi)| / |S(0, 0)| for rho < radial, psi < angular; rho-major.
FeatureVector gfd_features(const GrayImage& img, const GfdConfig& config = {});

// Three-term recurrence; L_0 = 1, L_1 = x.
double legendre_poly(int order, double x);

// Exact Legendre moments M_ab, 1 <= a, b <= max_order, a-major.
FeatureVector elm_features(const GrayImage& img, int max_order = 5);

}  // namespace finspect
