#pragma once

// Brute-force dense reference constructions for small grids. Everything here
// is O(N^2) memory and exists to check the fast paths.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "sbp/encoding.hpp"
#include "sbp/image.hpp"

namespace sbp::oracle {

inline constexpr std::size_t max_dense_size = 4096;

inline void check_cap(std::size_t n) {
  if (n > max_dense_size) {
    throw Error(Errc::size_cap_exceeded, "N=" + std::to_string(n) + " exceeds " + std::to_string(max_dense_size));
  }
}

inline Eigen::VectorXcd to_vector(const ComplexImage &img) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(img.size()));
  for (std::size_t k = 0; k < img.size(); ++k) v(static_cast<Eigen::Index>(k)) = img[k];
  return v;
}

inline ComplexImage to_image(const Eigen::VectorXcd &v, std::size_t m, std::size_t n) {
  ComplexImage img(m, n);
  for (std::size_t k = 0; k < img.size(); ++k) img[k] = v(static_cast<Eigen::Index>(k));
  return img;
}

/// Column j is op(e_j).
template <class Op>
Eigen::MatrixXcd dense_operator(const Op &op, std::size_t m, std::size_t n) {
  const std::size_t size = m * n;
  check_cap(size);
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  for (std::size_t j = 0; j < size; ++j) {
    ComplexImage e(m, n);
    e[j] = 1.0;
    out.col(static_cast<Eigen::Index>(j)) = to_vector(op(e));
  }
  return out;
}

/// Unitary 2D DFT matrix from explicit exponentials (row-major vectorization):
/// F[(p,q),(i,j)] = N^-1/2 exp(-2 pi i (p i / m + q j / n)).
inline Eigen::MatrixXcd dense_dft(std::size_t m, std::size_t n) {
  const std::size_t size = m * n;
  check_cap(size);
  Eigen::MatrixXcd F(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  const double scale = 1.0 / std::sqrt(static_cast<double>(size));
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          // Reduce the phase index before scaling to keep the angle exact-ish.
          const double ang = -2.0 * std::numbers::pi *
                             (static_cast<double>((p * i) % m) / static_cast<double>(m) +
                              static_cast<double>((q * j) % n) / static_cast<double>(n));
          F(static_cast<Eigen::Index>(p * n + q), static_cast<Eigen::Index>(i * n + j)) = std::polar(scale, ang);
        }
      }
    }
  }
  return F;
}

inline Eigen::MatrixXcd dense_A(const EncodingContext &ctx) {
  return dense_operator([&](const ComplexImage &x) { return apply_A(x, ctx); }, ctx.rows(), ctx.cols());
}

/// K = F A F^H.
inline Eigen::MatrixXcd dense_K(const EncodingContext &ctx) {
  const Eigen::MatrixXcd F = dense_dft(ctx.rows(), ctx.cols());
  return F * dense_A(ctx) * F.adjoint();
}

/// diag(F A F^H) reshaped to m x n.
inline ComplexImage dense_K_diag(const EncodingContext &ctx) {
  const Eigen::VectorXcd d = dense_K(ctx).diagonal();
  return to_image(d, ctx.rows(), ctx.cols());
}

/// Direct Cholesky solve of the dense A.
inline ComplexImage dense_solve(const EncodingContext &ctx, const ComplexImage &b) {
  ctx.require_shape(b);
  const Eigen::MatrixXcd A = dense_A(ctx);
  Eigen::LLT<Eigen::MatrixXcd> llt(A);
  if (llt.info() != Eigen::Success) throw Error(Errc::not_positive_definite, "Cholesky failed");
  return to_image(llt.solve(to_vector(b)), ctx.rows(), ctx.cols());
}

/// max |off-diagonal of F M F^H| relative to max |M|. A BCCB matrix gives ~0.
inline double bccb_defect(const Eigen::MatrixXcd &M, std::size_t m, std::size_t n) {
  const Eigen::MatrixXcd F = dense_dft(m, n);
  Eigen::MatrixXcd D = F * M * F.adjoint();
  D.diagonal().setZero();
  const double scale = M.cwiseAbs().maxCoeff();
  return scale > 0 ? D.cwiseAbs().maxCoeff() / scale : 0.0;
}

/// Frobenius mass off the diagonal relative to the whole matrix.
inline double offdiag_fraction(const Eigen::MatrixXcd &M) {
  Eigen::MatrixXcd off = M;
  off.diagonal().setZero();
  return off.norm() / M.norm();
}

} // namespace sbp::oracle
