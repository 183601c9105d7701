#pragma once

// Sparsifying transforms: periodic first differences and the orthogonal
// periodized Daubechies wavelet. The Fourier transform lives in fft.hpp.

#include <cmath>
#include <numbers>
#include <vector>

#include "sbp/fft.hpp"
#include "sbp/image.hpp"

namespace sbp {

/// Circular first difference along rows: out(i, j) = x(i, j) - x(i-1, j).
inline ComplexImage dx(const ComplexImage &x) {
  const std::size_t m = x.rows(), n = x.cols();
  ComplexImage out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t prev = (i + m - 1) % m;
    for (std::size_t j = 0; j < n; ++j) out(i, j) = x(i, j) - x(prev, j);
  }
  return out;
}

/// Circular first difference along columns: out(i, j) = x(i, j) - x(i, j-1).
inline ComplexImage dy(const ComplexImage &x) {
  const std::size_t m = x.rows(), n = x.cols();
  ComplexImage out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = x(i, j) - x(i, (j + n - 1) % n);
  }
  return out;
}

inline ComplexImage dx_adj(const ComplexImage &v) {
  const std::size_t m = v.rows(), n = v.cols();
  ComplexImage out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t next = (i + 1) % m;
    for (std::size_t j = 0; j < n; ++j) out(i, j) = v(i, j) - v(next, j);
  }
  return out;
}

inline ComplexImage dy_adj(const ComplexImage &v) {
  const std::size_t m = v.rows(), n = v.cols();
  ComplexImage out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = v(i, j) - v(i, (j + 1) % n);
  }
  return out;
}

/// dx_adj(dx(x)) + dy_adj(dy(x)) evaluated as one periodic 5-point stencil.
inline ComplexImage tv_normal(const ComplexImage &x) {
  const std::size_t m = x.rows(), n = x.cols();
  ComplexImage out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t up = (i + m - 1) % m, down = (i + 1) % m;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t left = (j + n - 1) % n, right = (j + 1) % n;
      out(i, j) = 4.0 * x(i, j) - x(up, j) - x(down, j) - x(i, left) - x(i, right);
    }
  }
  return out;
}

/// Row 0 of D_x^H D_x + D_y^H D_y, reshaped to m x n.
inline ComplexImage laplacian_first_row(std::size_t m, std::size_t n) {
  if (m < 2 || n < 2) throw Error(Errc::invalid_argument, "laplacian needs m, n >= 2");
  ComplexImage t(m, n);
  t(0, 0) += 4.0;
  t(1, 0) -= 1.0;
  t(m - 1, 0) -= 1.0;
  t(0, 1) -= 1.0;
  t(0, n - 1) -= 1.0;
  return t;
}

/// Orthonormal scaling filter plus decomposition depth. Periodic boundaries.
struct WaveletSpec {
  std::vector<double> taps;
  int levels = 4;

  /// The 4-tap Daubechies filter (two vanishing moments).
  static WaveletSpec daubechies4(int levels = 4) {
    const double s3 = std::sqrt(3.0);
    const double d = 4.0 * std::numbers::sqrt2;
    return {{(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d}, levels};
  }

  static WaveletSpec haar(int levels = 4) {
    return {{1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2}, levels};
  }

  void check() const {
    if (taps.size() < 2 || taps.size() % 2 != 0) {
      throw Error(Errc::invalid_argument, "filter must have an even, nonzero number of taps");
    }
    double sum = 0, sumsq = 0;
    for (double t : taps) {
      sum += t;
      sumsq += t * t;
    }
    if (std::abs(sumsq - 1.0) > 1e-12 || std::abs(sum - std::numbers::sqrt2) > 1e-12) {
      throw Error(Errc::invalid_argument, "filter is not an orthonormal scaling filter");
    }
    if (levels < 1) throw Error(Errc::invalid_argument, "levels must be positive");
  }

  void check_dims(std::size_t m, std::size_t n) const {
    check();
    const std::size_t block = std::size_t{1} << levels;
    if (m % block != 0 || n % block != 0) {
      throw Error(Errc::dimension_not_divisible,
                  std::to_string(m) + "x" + std::to_string(n) + " is not divisible by 2^" +
                      std::to_string(levels));
    }
  }

  std::vector<double> highpass() const {
    const std::size_t t = taps.size();
    std::vector<double> g(t);
    for (std::size_t k = 0; k < t; ++k) g[k] = (k % 2 == 0 ? 1.0 : -1.0) * taps[t - 1 - k];
    return g;
  }
};

namespace detail {

// One analysis step on a strided line of even length len: lowpass outputs go
// to the first half, highpass to the second.
inline void dwt_line(cplx *x, std::size_t len, std::size_t stride, const std::vector<double> &h,
                     const std::vector<double> &g, std::vector<cplx> &tmp) {
  const std::size_t half = len / 2;
  tmp.assign(len, cplx{});
  for (std::size_t k = 0; k < half; ++k) {
    cplx a{}, d{};
    for (std::size_t t = 0; t < h.size(); ++t) {
      const cplx v = x[((2 * k + t) % len) * stride];
      a += h[t] * v;
      d += g[t] * v;
    }
    tmp[k] = a;
    tmp[half + k] = d;
  }
  for (std::size_t k = 0; k < len; ++k) x[k * stride] = tmp[k];
}

inline void idwt_line(cplx *x, std::size_t len, std::size_t stride, const std::vector<double> &h,
                      const std::vector<double> &g, std::vector<cplx> &tmp) {
  const std::size_t half = len / 2;
  tmp.assign(len, cplx{});
  for (std::size_t k = 0; k < half; ++k) {
    const cplx a = x[k * stride];
    const cplx d = x[(half + k) * stride];
    for (std::size_t t = 0; t < h.size(); ++t) tmp[(2 * k + t) % len] += h[t] * a + g[t] * d;
  }
  for (std::size_t k = 0; k < len; ++k) x[k * stride] = tmp[k];
}

} // namespace detail

/// Multi-level separable wavelet analysis. The coarsest approximation ends up
/// in the top-left (m / 2^L) x (n / 2^L) block.
inline ComplexImage dwt2(ComplexImage img, const WaveletSpec &spec) {
  spec.check_dims(img.rows(), img.cols());
  const auto g = spec.highpass();
  const std::size_t n = img.cols();
  std::vector<cplx> tmp;
  std::size_t rows = img.rows(), cols = img.cols();
  cplx *base = img.data().data();
  for (int level = 0; level < spec.levels; ++level) {
    for (std::size_t i = 0; i < rows; ++i) detail::dwt_line(base + i * n, cols, 1, spec.taps, g, tmp);
    for (std::size_t j = 0; j < cols; ++j) detail::dwt_line(base + j, rows, n, spec.taps, g, tmp);
    rows /= 2;
    cols /= 2;
  }
  return img;
}

inline ComplexImage idwt2(ComplexImage img, const WaveletSpec &spec) {
  spec.check_dims(img.rows(), img.cols());
  const auto g = spec.highpass();
  const std::size_t n = img.cols();
  std::vector<cplx> tmp;
  cplx *base = img.data().data();
  for (int level = spec.levels - 1; level >= 0; --level) {
    const std::size_t rows = img.rows() >> level, cols = img.cols() >> level;
    for (std::size_t j = 0; j < cols; ++j) detail::idwt_line(base + j, rows, n, spec.taps, g, tmp);
    for (std::size_t i = 0; i < rows; ++i) detail::idwt_line(base + i * n, cols, 1, spec.taps, g, tmp);
  }
  return img;
}

} // namespace sbp
