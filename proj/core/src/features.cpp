#include "finspect/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "finspect/error.hpp"

namespace finspect {
namespace {

double mass(const GrayImage& img) {
  double m = 0.0;
  for (double v : img.values()) m += v;
  return m;
}

// Integral of t^p over [c - 1/2, c + 1/2].
double cell_integral(double c, int p) {
  return (std::pow(c + 0.5, p + 1) - std::pow(c - 0.5, p + 1)) / (p + 1);
}

// Central moments mu_pq (p + q <= order) integrated over pixel squares.
class AreaMoments {
 public:
  AreaMoments(const GrayImage& img, int order) : order_(order), mu_((order + 1) * (order + 1), 0.0) {
    const Centroid c = centroid(img);
    std::vector<double> ix(static_cast<std::size_t>(order + 1));
    std::vector<double> iy(static_cast<std::size_t>(order + 1));
    for (int y = 0; y < img.height(); ++y) {
      for (int p = 0; p <= order; ++p) iy[static_cast<std::size_t>(p)] = cell_integral(y - c.y, p);
      for (int x = 0; x < img.width(); ++x) {
        const double g = img.at(x, y);
        if (g == 0.0) continue;
        for (int p = 0; p <= order; ++p) ix[static_cast<std::size_t>(p)] = cell_integral(x - c.x, p);
        for (int p = 0; p <= order; ++p) {
          for (int q = 0; p + q <= order; ++q) {
            mu_[static_cast<std::size_t>(p * (order + 1) + q)] +=
                g * ix[static_cast<std::size_t>(p)] * iy[static_cast<std::size_t>(q)];
          }
        }
      }
    }
  }

  double mu(int p, int q) const { return mu_[static_cast<std::size_t>(p * (order_ + 1) + q)]; }

  // (x + iy)^a (x - iy)^b expanded binomially over real monomials.
  std::complex<double> complex(int a, int b) const {
    std::complex<double> sum{0.0, 0.0};
    for (int u = 0; u <= a; ++u) {
      for (int v = 0; v <= b; ++v) {
        const std::complex<double> coeff =
            binomial(a, u) * binomial(b, v) * ipow(u) * std::conj(ipow(v));
        sum += coeff * mu(a + b - u - v, u + v);
      }
    }
    return sum;
  }

 private:
  static double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  }
  static std::complex<double> ipow(int n) {
    static const std::complex<double> powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return powers[n % 4];
  }

  int order_;
  std::vector<double> mu_;
};

std::string format_number(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

std::string_view to_string(Extractor e) {
  switch (e) {
    case Extractor::kCmi: return "cmi";
    case Extractor::kGfd: return "gfd";
    case Extractor::kElm: return "elm";
  }
  return "?";
}

Extractor extractor_from_string(std::string_view name) {
  if (name == "cmi") return Extractor::kCmi;
  if (name == "gfd") return Extractor::kGfd;
  if (name == "elm") return Extractor::kElm;
  fail(ErrorKind::kParameter, "unknown extractor '" + std::string(name) + "'");
}

Centroid centroid(const GrayImage& img) {
  double m = 0.0, sx = 0.0, sy = 0.0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double g = img.at(x, y);
      m += g;
      sx += x * g;
      sy += y * g;
    }
  }
  if (m <= 0.0) fail(ErrorKind::kZeroMass, "image has zero total intensity");
  return {sx / m, sy / m};
}

double geometric_moment(const GrayImage& img, int a, int b, bool central, MomentRule rule) {
  if (a < 0 || b < 0) fail(ErrorKind::kParameter, "moment orders must be non-negative");
  Centroid c;
  if (central) c = centroid(img);
  double sum = 0.0;
  for (int y = 0; y < img.height(); ++y) {
    const double yy = y - c.y;
    const double wy = rule == MomentRule::kPixelArea ? cell_integral(yy, b) : std::pow(yy, b);
    for (int x = 0; x < img.width(); ++x) {
      const double g = img.at(x, y);
      if (g == 0.0) continue;
      const double xx = x - c.x;
      const double wx = rule == MomentRule::kPixelArea ? cell_integral(xx, a) : std::pow(xx, a);
      sum += wx * wy * g;
    }
  }
  return sum;
}

std::complex<double> complex_moment(const GrayImage& img, int a, int b) {
  if (a < 0 || b < 0) fail(ErrorKind::kParameter, "moment orders must be non-negative");
  return AreaMoments(img, a + b).complex(a, b);
}

bool MomentProductSpec::rotation_invariant() const {
  double s = 0.0;
  for (const auto& t : terms) s += t.c * (t.a - t.b);
  return std::abs(s) <= 1e-12;
}

std::string MomentProductSpec::label() const {
  std::string out;
  for (const auto& t : terms) {
    if (!out.empty()) out += '*';
    out += "M" + std::to_string(t.a) + std::to_string(t.b);
    if (t.c != 1.0) out += "^" + format_number(t.c);
  }
  return out;
}

std::vector<MomentProductSpec> default_cmi_basis() {
  return {
      {{{0, 2, 1.0}, {2, 0, 1.0}}},
      {{{1, 2, 2.0}, {2, 0, 1.0}}},
      {{{1, 2, 1.0}, {2, 1, 1.0}}},
      {{{2, 1, 2.0}, {0, 2, 1.0}}},
      {{{1, 3, 3.0}, {4, 2, 3.0}}},
      {{{3, 2, 2.0}, {2, 3, 2.0}}},
  };
}

FeatureVector cmi_features(const GrayImage& img, std::span<const MomentProductSpec> basis) {
  int order = 0;
  for (const auto& spec : basis) {
    if (spec.terms.empty()) fail(ErrorKind::kSpecification, "empty moment product");
    if (!spec.rotation_invariant()) {
      fail(ErrorKind::kSpecification, spec.label() + " violates sum c_i (a_i - b_i) = 0");
    }
    for (const auto& t : spec.terms) {
      if (t.a < 0 || t.b < 0) fail(ErrorKind::kSpecification, "moment orders must be non-negative");
      order = std::max(order, t.a + t.b);
    }
  }
  const AreaMoments moments(img, order);  // throws kZeroMass
  const double c00 = moments.mu(0, 0);

  FeatureVector fv;
  fv.extractor = Extractor::kCmi;
  for (const auto& spec : basis) {
    // |prod C^c / C00^w| = prod |C|^c / C00^w for any branch of the power.
    double value = 1.0;
    for (const auto& t : spec.terms) {
      const double w = t.c * (t.a + t.b + 2) / 2.0;
      value *= std::pow(std::abs(moments.complex(t.a, t.b)), t.c) / std::pow(c00, w);
    }
    fv.descriptor.push_back(spec.label());
    fv.values.push_back(value);
  }
  return fv;
}

FeatureVector cmi_features(const GrayImage& img) {
  const auto basis = default_cmi_basis();
  return cmi_features(img, basis);
}

PolarSamples polar_resample(const GrayImage& img, const GfdConfig& config) {
  if (config.radial < 1 || config.angular < 1 || config.radial_samples < 1 || config.angular_samples < 1) {
    fail(ErrorKind::kParameter, "GFD resolutions must be >= 1");
  }
  PolarSamples ps;
  ps.radial = config.radial_samples;
  ps.angular = config.angular_samples;
  ps.center = centroid(img);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.at(x, y) > 0.0) ps.r_max = std::max(ps.r_max, std::hypot(x - ps.center.x, y - ps.center.y));
    }
  }
  // A single-pixel shape sits on its centroid; give it a unit radius.
  if (ps.r_max <= 0.0) ps.r_max = 1.0;

  auto pixel = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return 0.0;
    return img.at(x, y);
  };
  ps.values.resize(static_cast<std::size_t>(ps.radial) * static_cast<std::size_t>(ps.angular));
  for (int m = 0; m < ps.radial; ++m) {
    const double r = (m + 0.5) / ps.radial * ps.r_max;
    for (int t = 0; t < ps.angular; ++t) {
      const double theta = 2.0 * std::numbers::pi * t / ps.angular;
      const double px = ps.center.x + r * std::cos(theta);
      const double py = ps.center.y + r * std::sin(theta);
      const double fx = std::floor(px);
      const double fy = std::floor(py);
      const double ax = px - fx;
      const double ay = py - fy;
      const int x0 = static_cast<int>(fx);
      const int y0 = static_cast<int>(fy);
      ps.values[static_cast<std::size_t>(m) * ps.angular + t] =
          (1 - ax) * (1 - ay) * pixel(x0, y0) + ax * (1 - ay) * pixel(x0 + 1, y0) +
          (1 - ax) * ay * pixel(x0, y0 + 1) + ax * ay * pixel(x0 + 1, y0 + 1);
    }
  }
  return ps;
}

FeatureVector gfd_features(const GrayImage& img, const GfdConfig& config) {
  const PolarSamples ps = polar_resample(img, config);

  // Angular transform per radius first, then the radial sum.
  std::vector<std::complex<double>> angular(static_cast<std::size_t>(ps.radial) * config.angular);
  for (int m = 0; m < ps.radial; ++m) {
    for (int psi = 0; psi < config.angular; ++psi) {
      std::complex<double> s{0.0, 0.0};
      for (int t = 0; t < ps.angular; ++t) {
        const double theta = 2.0 * std::numbers::pi * t / ps.angular;
        s += ps.at(m, t) * std::polar(1.0, -psi * theta);
      }
      angular[static_cast<std::size_t>(m) * config.angular + psi] = s;
    }
  }
  std::vector<double> magnitude(static_cast<std::size_t>(config.radial) * config.angular);
  for (int rho = 0; rho < config.radial; ++rho) {
    for (int psi = 0; psi < config.angular; ++psi) {
      std::complex<double> s{0.0, 0.0};
      for (int m = 0; m < ps.radial; ++m) {
        const double r_norm = (m + 0.5) / ps.radial;
        s += angular[static_cast<std::size_t>(m) * config.angular + psi] *
             std::polar(1.0, -2.0 * std::numbers::pi * rho * r_norm);
      }
      magnitude[static_cast<std::size_t>(rho) * config.angular + psi] = std::abs(s);
    }
  }
  const double dc = magnitude[0];
  if (dc <= 0.0) fail(ErrorKind::kZeroMass, "|S(0, 0)| is zero");

  FeatureVector fv;
  fv.extractor = Extractor::kGfd;
  for (int rho = 0; rho < config.radial; ++rho) {
    for (int psi = 0; psi < config.angular; ++psi) {
      fv.descriptor.push_back("rho=" + std::to_string(rho) + ",psi=" + std::to_string(psi));
      fv.values.push_back(magnitude[static_cast<std::size_t>(rho) * config.angular + psi] / dc);
    }
  }
  fv.values[0] = 1.0;
  return fv;
}

double legendre_poly(int order, double x) {
  if (order < 0) fail(ErrorKind::kParameter, "Legendre order must be non-negative");
  if (order == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int a = 1; a < order; ++a) {
    const double next = ((2 * a + 1) * x * cur - a * prev) / (a + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

// (2a+1)/(2a+2) [t L_a(t) - L_{a-1}(t)] between lo and hi.
double legendre_cell(int a, double lo, double hi) {
  auto antiderivative = [a](double t) { return t * legendre_poly(a, t) - legendre_poly(a - 1, t); };
  return (2.0 * a + 1.0) / (2.0 * a + 2.0) * (antiderivative(hi) - antiderivative(lo));
}

}  // namespace

FeatureVector elm_features(const GrayImage& img, int max_order) {
  if (max_order < 1) fail(ErrorKind::kParameter, "ELM max order must be >= 1");
  if (img.empty()) fail(ErrorKind::kParameter, "ELM needs a non-empty image");

  FeatureVector fv;
  fv.extractor = Extractor::kElm;
  const std::size_t orders = static_cast<std::size_t>(max_order);
  fv.values.assign(orders * orders, 0.0);
  for (int a = 1; a <= max_order; ++a) {
    for (int b = 1; b <= max_order; ++b) {
      fv.descriptor.push_back("a=" + std::to_string(a) + ",b=" + std::to_string(b));
    }
  }
  // g == 0 everywhere makes every moment zero; there is no centroid to shift by.
  if (mass(img) <= 0.0) return fv;

  const Centroid c = centroid(img);
  const double dx = 2.0 / img.width();
  const double dy = 2.0 / img.height();

  // Row and column integrals, I[a-1][i].
  std::vector<std::vector<double>> ix(orders, std::vector<double>(static_cast<std::size_t>(img.width())));
  std::vector<std::vector<double>> iy(orders, std::vector<double>(static_cast<std::size_t>(img.height())));
  for (int a = 1; a <= max_order; ++a) {
    for (int x = 0; x < img.width(); ++x) {
      const double t = (x - c.x) * dx;
      ix[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(x)] = legendre_cell(a, t - dx / 2, t + dx / 2);
    }
    for (int y = 0; y < img.height(); ++y) {
      const double t = (y - c.y) * dy;
      iy[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(y)] = legendre_cell(a, t - dy / 2, t + dy / 2);
    }
  }
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double g = img.at(x, y);
      if (g == 0.0) continue;
      for (std::size_t a = 0; a < orders; ++a) {
        const double wa = ix[a][static_cast<std::size_t>(x)] * g;
        for (std::size_t b = 0; b < orders; ++b) {
          fv.values[a * orders + b] += wa * iy[b][static_cast<std::size_t>(y)];
        }
      }
    }
  }
  return fv;
}

}  // namespace finspect
