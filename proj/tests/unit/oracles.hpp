#pragma once

// Independent reference implementations. They deliberately share no code with
// the library: dense algebra, brute-force searches and direct sums only.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Gaussian elimination with partial pivoting; solves A X = B column by column.
inline Matrix solve(Matrix a, Matrix b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-300) throw std::runtime_error("singular system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      for (std::size_t c = 0; c < b[r].size(); ++c) b[r][c] -= f * b[col][c];
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (double& v : b[r]) v /= a[r][r];
  }
  return b;
}

inline Matrix inverse(const Matrix& a) {
  Matrix id(a.size(), std::vector<double>(a.size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) id[i][i] = 1.0;
  return solve(a, id);
}

inline Matrix inverse2x2(const Matrix& m) {
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return {{m[1][1] / det, -m[0][1] / det}, {-m[1][0] / det, m[0][0] / det}};
}

// Sample covariance with divisor n - 1 (unbiased) or n.
inline Matrix covariance(const Matrix& rows, bool unbiased) {
  const std::size_t n = rows.size();
  const std::size_t d = rows.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < d; ++k) mean[k] += r[k] / static_cast<double>(n);
  }
  Matrix cov(d, std::vector<double>(d, 0.0));
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
    }
  }
  const double div = unbiased ? static_cast<double>(n - 1) : static_cast<double>(n);
  for (auto& row : cov) {
    for (double& v : row) v /= div;
  }
  return cov;
}

inline double mahalanobis(const std::vector<double>& a, const std::vector<double>& b, const Matrix& cov_inverse) {
  const std::size_t d = a.size();
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) s += (a[i] - b[i]) * cov_inverse[i][j] * (a[j] - b[j]);
  }
  return std::sqrt(std::max(s, 0.0));
}

// Exhaustive k nearest neighbours by Mahalanobis distance. Returns the
// majority class, or -1 if the vote is tied or the k-th neighbour is tied
// with the (k+1)-th.
inline int knn_unique(const Matrix& rows, const std::vector<int>& labels, int classes, const std::vector<double>& q,
                      std::size_t k, const Matrix& cov_inverse) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < rows.size(); ++i) d.emplace_back(mahalanobis(q, rows[i], cov_inverse), i);
  std::sort(d.begin(), d.end());
  if (k < d.size() && std::abs(d[k].first - d[k - 1].first) < 1e-9) return -1;
  std::vector<int> votes(static_cast<std::size_t>(classes), 0);
  for (std::size_t i = 0; i < k; ++i) ++votes[static_cast<std::size_t>(labels[d[i].second])];
  const auto best = std::max_element(votes.begin(), votes.end());
  if (std::count(votes.begin(), votes.end(), *best) > 1) return -1;
  return static_cast<int>(best - votes.begin());
}

// Otsu by direct search: for every threshold t (background = samples whose
// 8-bit level is below t) the between-class variance w0 w1 (m0 - m1)^2 is
// computed from the samples themselves. Optimal thresholds within a relative
// 1e-9 of the best are averaged; theta is reported as (t - 1) / 255.
inline double otsu_theta(const std::vector<double>& values) {
  std::vector<int> levels;
  for (double v : values) levels.push_back(static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  const auto [lo, hi] = std::minmax_element(levels.begin(), levels.end());
  std::vector<std::pair<int, double>> scores;
  for (int t = *lo + 1; t <= *hi; ++t) {
    double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (int l : levels) {
      if (l < t) {
        n0 += 1;
        s0 += l / 255.0;
      } else {
        n1 += 1;
        s1 += l / 255.0;
      }
    }
    const double n = n0 + n1;
    const double m0 = s0 / n0, m1 = s1 / n1;
    scores.emplace_back(t, (n0 / n) * (n1 / n) * (m0 - m1) * (m0 - m1));
  }
  double best = 0.0;
  for (const auto& s : scores) best = std::max(best, s.second);
  double sum = 0.0;
  int count = 0;
  for (const auto& s : scores) {
    if (best - s.second <= 1e-9 * best) {
      sum += (s.first - 1) / 255.0;
      ++count;
    }
  }
  return sum / count;
}

// Dense random walker on a width x height grid: Laplacian with weights
// exp(-(g_i - g_j)^2 / max(var(g), 1e-6)) over 4-neighbours, Dirichlet
// boundary at the seeds. Returns probs[pixel][set].
inline Matrix random_walker(const std::vector<double>& g, int width, int height,
                            const std::vector<std::vector<int>>& seeds) {
  const int n = width * height;
  const double mean = std::accumulate(g.begin(), g.end(), 0.0) / n;
  double var = 0.0;
  for (double v : g) var += (v - mean) * (v - mean) / n;
  const double sigma = std::max(var, 1e-6);

  Matrix lap(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  auto link = [&](int i, int j) {
    const double w = std::exp(-(g[i] - g[j]) * (g[i] - g[j]) / sigma);
    lap[i][j] -= w;
    lap[j][i] -= w;
    lap[i][i] += w;
    lap[j][j] += w;
  };
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x + 1 < width) link(y * width + x, y * width + x + 1);
      if (y + 1 < height) link(y * width + x, (y + 1) * width + x);
    }
  }
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    for (int p : seeds[s]) owner[p] = static_cast<int>(s);
  }
  std::vector<int> free;
  for (int p = 0; p < n; ++p) {
    if (owner[p] == -1) free.push_back(p);
  }
  Matrix probs(static_cast<std::size_t>(n), std::vector<double>(seeds.size(), 0.0));
  for (int p = 0; p < n; ++p) {
    if (owner[p] != -1) probs[p][owner[p]] = 1.0;
  }
  if (free.empty()) return probs;
  Matrix lu(free.size(), std::vector<double>(free.size()));
  Matrix rhs(free.size(), std::vector<double>(seeds.size(), 0.0));
  for (std::size_t a = 0; a < free.size(); ++a) {
    for (std::size_t b = 0; b < free.size(); ++b) lu[a][b] = lap[free[a]][free[b]];
    for (int p = 0; p < n; ++p) {
      if (owner[p] != -1) rhs[a][owner[p]] -= lap[free[a]][p];
    }
  }
  const Matrix x = solve(lu, rhs);
  for (std::size_t a = 0; a < free.size(); ++a) probs[free[a]] = x[a];
  return probs;
}

// Central difference of f at x along coordinate i.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, std::size_t i, double h) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double up = f(x);
  x[i] = x0 - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

// Legendre polynomial coefficients from Rodrigues' formula,
// L_n = 1 / (2^n n!) d^n/dx^n (x^2 - 1)^n. Index = power of x.
inline std::vector<double> legendre_coefficients(int n) {
  std::vector<double> p(static_cast<std::size_t>(2 * n + 1), 0.0);
  // (x^2 - 1)^n = sum_k C(n, k) (-1)^(n-k) x^(2k)
  double binom = 1.0;
  for (int k = 0; k <= n; ++k) {
    p[static_cast<std::size_t>(2 * k)] = binom * (((n - k) % 2) ? -1.0 : 1.0);
    binom = binom * (n - k) / (k + 1);
  }
  for (int d = 0; d < n; ++d) {
    std::vector<double> q(p.size(), 0.0);
    for (std::size_t e = 1; e < p.size(); ++e) q[e - 1] = p[e] * static_cast<double>(e);
    p = q;
  }
  double scale = 1.0;
  for (int i = 1; i <= n; ++i) scale *= 2.0 * i;
  for (double& c : p) c /= scale;
  p.resize(static_cast<std::size_t>(n + 1));
  return p;
}

inline double polynomial(const std::vector<double>& coeff, double x) {
  double s = 0.0;
  for (std::size_t i = coeff.size(); i-- > 0;) s = s * x + coeff[i];
  return s;
}

// Integral of L_n over [lo, hi] by 8-point Gauss-Legendre quadrature (exact
// for n <= 15).
inline double legendre_integral(int n, double lo, double hi) {
  static const double nodes[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
  static const double weights[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  const auto coeff = legendre_coefficients(n);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    s += weights[i] * (polynomial(coeff, mid + half * nodes[i]) + polynomial(coeff, mid - half * nodes[i]));
  }
  return s * half;
}

// Exact Legendre moments of a width x height image mapped onto [-1, 1]^2 with
// the intensity centroid at the origin:
// M_ab = (2a+1)(2b+1)/4 sum_pixels g * int_cell L_a(x) dx * int_cell L_b(y) dy.
inline std::vector<double> elm(const std::vector<double>& g, int width, int height, int max_order) {
  double m = 0, sx = 0, sy = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      m += g[y * width + x];
      sx += x * g[y * width + x];
      sy += y * g[y * width + x];
    }
  }
  const double cx = sx / m, cy = sy / m;
  const double dx = 2.0 / width, dy = 2.0 / height;
  std::vector<double> out;
  for (int a = 1; a <= max_order; ++a) {
    for (int b = 1; b <= max_order; ++b) {
      double s = 0.0;
      for (int y = 0; y < height; ++y) {
        const double ty = (y - cy) * dy;
        const double iy = legendre_integral(b, ty - dy / 2, ty + dy / 2);
        for (int x = 0; x < width; ++x) {
          const double tx = (x - cx) * dx;
          s += g[y * width + x] * legendre_integral(a, tx - dx / 2, tx + dx / 2) * iy;
        }
      }
      out.push_back((2 * a + 1) * (2 * b + 1) / 4.0 * s);
    }
  }
  return out;
}

// Generic Fourier descriptor by a single direct double sum over polar samples:
// S(rho, psi) = sum_m sum_t f(r_m, theta_t) exp(-2 pi i (rho r_m / r_max + psi t / T)).
// Samples are bilinear around the intensity centroid; r_max is the largest
// distance from the centroid to a non-zero pixel centre.
inline std::vector<double> gfd(const std::vector<double>& g, int width, int height, int radial, int angular,
                               int radial_samples, int angular_samples) {
  double m = 0, sx = 0, sy = 0, r_max = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      m += g[y * width + x];
      sx += x * g[y * width + x];
      sy += y * g[y * width + x];
    }
  }
  const double cx = sx / m, cy = sy / m;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (g[y * width + x] > 0) r_max = std::max(r_max, std::sqrt((x - cx) * (x - cx) + (y - cy) * (y - cy)));
    }
  }
  if (r_max == 0) r_max = 1;
  auto pix = [&](int x, int y) { return (x < 0 || y < 0 || x >= width || y >= height) ? 0.0 : g[y * width + x]; };
  auto sample = [&](double px, double py) {
    const int x0 = static_cast<int>(std::floor(px));
    const int y0 = static_cast<int>(std::floor(py));
    const double ax = px - x0, ay = py - y0;
    return pix(x0, y0) * (1 - ax) * (1 - ay) + pix(x0 + 1, y0) * ax * (1 - ay) + pix(x0, y0 + 1) * (1 - ax) * ay +
           pix(x0 + 1, y0 + 1) * ax * ay;
  };
  std::vector<double> mag;
  for (int rho = 0; rho < radial; ++rho) {
    for (int psi = 0; psi < angular; ++psi) {
      std::complex<double> s = 0.0;
      for (int mi = 0; mi < radial_samples; ++mi) {
        const double rn = (mi + 0.5) / radial_samples;
        for (int t = 0; t < angular_samples; ++t) {
          const double th = 2.0 * std::numbers::pi * t / angular_samples;
          const double f = sample(cx + rn * r_max * std::cos(th), cy + rn * r_max * std::sin(th));
          s += f * std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * (rho * rn) - psi * th));
        }
      }
      mag.push_back(std::abs(s));
    }
  }
  const double dc = mag[0];
  for (double& v : mag) v /= dc;
  return mag;
}

// Median of the replicate-padded side x side window, by full sort.
inline std::vector<double> median_filter(const std::vector<double>& g, int width, int height, int side) {
  const int half = side / 2;
  std::vector<double> out(g.size());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      std::vector<double> win;
      for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) {
          const int xx = std::min(std::max(x + dx, 0), width - 1);
          const int yy = std::min(std::max(y + dy, 0), height - 1);
          win.push_back(g[yy * width + xx]);
        }
      }
      std::sort(win.begin(), win.end());
      out[y * width + x] = win[win.size() / 2];
    }
  }
  return out;
}

// Complex moment C_ab with the integrand integrated over each pixel square by
// 8x8 Gauss-Legendre quadrature (exact for a + b <= 15).
inline std::complex<double> complex_moment(const std::vector<double>& g, int width, int height, int a, int b) {
  static const double nodes[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                  -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                  0.7966664774136267,  0.9602898564975363};
  static const double weights[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                    0.2223810344533745, 0.1012285362903763};
  double m = 0, sx = 0, sy = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      m += g[y * width + x];
      sx += x * g[y * width + x];
      sy += y * g[y * width + x];
    }
  }
  const double cx = sx / m, cy = sy / m;
  std::complex<double> s = 0.0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double v = g[y * width + x];
      if (v == 0.0) continue;
      for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
          const std::complex<double> z(x - cx + 0.5 * nodes[i], y - cy + 0.5 * nodes[j]);
          std::complex<double> term = v * 0.25 * weights[i] * weights[j];
          for (int k = 0; k < a; ++k) term *= z;
          for (int k = 0; k < b; ++k) term *= std::conj(z);
          s += term;
        }
      }
    }
  }
  return s;
}

}  // namespace oracle
