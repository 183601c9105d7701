#pragma once

// Circulant preconditioner M^-1 = F^H diag(k)^-1 F, k = mu k_c + lambda k_d + gamma,
// and the Jacobi (diag A) baseline.

#include <chrono>
#include <cmath>
#include <numbers>

#include "sbp/encoding.hpp"
#include "sbp/fft.hpp"

namespace sbp {

/// Diagonal of K_c = sum_i F S_i^H F^H R F S_i F^H.
///
/// With C_i = F S_i F^H one has C_i[q, p] = N^-1/2 fft2(s_i)[q - p], so
///   k_c[p] = N^-1 sum_q w[q - p] r[q],   w = sum_i |fft2(s_i)|^2,
/// a circular correlation of w with r. Writing it as a convolution with the
/// flipped profile w'[u] = w[-u] = sum_i |ifft2(s_i)[u]|^2 and using the
/// unitary transforms (conv(a, b) = sqrt(N) ifft2(fft2(a) fft2(b))):
///   k_c = N^-1/2 ifft2(fft2(w') o fft2(r)).
/// The result agrees with diag(F A F^H) from the dense oracle.
inline ComplexImage k_c_diag(const CoilSet &sens, const SamplingMask &mask) {
  if (sens.rows() != mask.rows() || sens.cols() != mask.cols()) {
    throw Error(Errc::dimension_mismatch, "sensitivities and mask differ in shape");
  }
  const std::size_t m = sens.rows(), n = sens.cols();
  ComplexImage w(m, n);
  ComplexImage c(m, n);
  for (const auto &s : sens) {
    c = s;
    ifft2_inplace(c);
    for (std::size_t p = 0; p < w.size(); ++p) w[p] += std::norm(c[p]);
  }
  fft2_inplace(w);
  ComplexImage r = fft2(mask.as_image());
  for (std::size_t p = 0; p < w.size(); ++p) w[p] *= r[p];
  ifft2_inplace(w);
  w *= 1.0 / std::sqrt(static_cast<double>(w.size()));
  return w;
}

/// Eigenvalues of the periodic TV normal operator:
/// k_d(p, q) = 4 - 2 cos(2 pi p / m) - 2 cos(2 pi q / n).
inline ComplexImage k_d_diag(std::size_t m, std::size_t n) {
  if (m < 2 || n < 2) throw Error(Errc::invalid_argument, "k_d needs m, n >= 2");
  ComplexImage k(m, n);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t p = 0; p < m; ++p) {
    const double cp = std::cos(two_pi * static_cast<double>(p) / static_cast<double>(m));
    for (std::size_t q = 0; q < n; ++q) {
      const double cq = std::cos(two_pi * static_cast<double>(q) / static_cast<double>(n));
      k(p, q) = 4.0 - 2.0 * cp - 2.0 * cq;
    }
  }
  return k;
}

/// The k grid of the circulant approximation (before inversion).
inline ComplexImage circulant_k(const EncodingContext &ctx) {
  const auto &p = ctx.params();
  ComplexImage k(ctx.rows(), ctx.cols(), cplx{p.gamma, 0.0});
  if (p.mu != 0.0) axpy(p.mu, k_c_diag(ctx.sens(), ctx.mask()), k);
  if (p.lambda != 0.0) axpy(p.lambda, k_d_diag(ctx.rows(), ctx.cols()), k);
  return k;
}

class CirculantPreconditioner {
public:
  CirculantPreconditioner(ComplexImage k_inv, double build_seconds)
      : k_inv_(std::move(k_inv)), build_seconds_(build_seconds) {}

  const ComplexImage &k_inv() const noexcept { return k_inv_; }
  double build_seconds() const noexcept { return build_seconds_; }

  /// ifft2(k^-1 o fft2(r)): two FFTs and one product.
  ComplexImage apply(const ComplexImage &r) const {
    ComplexImage z = fft2(r);
    for (std::size_t p = 0; p < z.size(); ++p) z[p] *= k_inv_[p];
    ifft2_inplace(z);
    return z;
  }
  ComplexImage operator()(const ComplexImage &r) const { return apply(r); }

private:
  ComplexImage k_inv_;
  double build_seconds_;
};

inline CirculantPreconditioner build_circulant(const EncodingContext &ctx) {
  const auto start = std::chrono::steady_clock::now();
  ComplexImage k = circulant_k(ctx);
  for (std::size_t p = 0; p < k.size(); ++p) {
    if (std::abs(k[p]) <= 1e-14) {
      throw Error(Errc::singular_k, "|k| vanishes at index " + std::to_string(p));
    }
    k[p] = 1.0 / k[p];
  }
  const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
  return {std::move(k), took.count()};
}

inline ComplexImage apply_circulant(const ComplexImage &r, const CirculantPreconditioner &P) {
  return P.apply(r);
}

class JacobiPreconditioner {
public:
  explicit JacobiPreconditioner(ComplexImage d_inv) : d_inv_(std::move(d_inv)) {}

  const ComplexImage &d_inv() const noexcept { return d_inv_; }
  ComplexImage apply(const ComplexImage &r) const { return hadamard(d_inv_, r); }
  ComplexImage operator()(const ComplexImage &r) const { return apply(r); }

private:
  ComplexImage d_inv_;
};

/// diag(A)_j = mu f sum_i |s_ij|^2 + 4 lambda + gamma, where f is the sampled
/// fraction (F^H R F has constant diagonal f).
inline ComplexImage jacobi_diagonal(const EncodingContext &ctx) {
  const auto &p = ctx.params();
  const double f = ctx.mask().sampled_fraction();
  ComplexImage d(ctx.rows(), ctx.cols(), cplx{4.0 * p.lambda + p.gamma, 0.0});
  for (const auto &s : ctx.sens()) {
    for (std::size_t q = 0; q < d.size(); ++q) d[q] += p.mu * f * std::norm(s[q]);
  }
  return d;
}

inline JacobiPreconditioner build_jacobi(const EncodingContext &ctx) {
  ComplexImage d = jacobi_diagonal(ctx);
  for (std::size_t q = 0; q < d.size(); ++q) {
    if (!(std::abs(d[q]) > 0.0) || !std::isfinite(d[q].real())) {
      throw Error(Errc::singular_diagonal, "diag(A) vanishes at index " + std::to_string(q));
    }
    d[q] = 1.0 / d[q];
  }
  return JacobiPreconditioner(std::move(d));
}

} // namespace sbp
