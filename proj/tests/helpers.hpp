#pragma once

// Shared fixtures: seeded random inputs and dense matrices assembled directly
// from the operator definitions (independent of the fast FFT/stencil code).

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "sbp/oracle.hpp"
#include "sbp/sbp.hpp"

namespace sbp::testing {

inline ComplexImage random_image(std::size_t m, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  ComplexImage img(m, n);
  for (auto &v : img) v = {rng.normal(), rng.normal()};
  return img;
}

inline CoilSet random_coils(std::size_t nc, std::size_t m, std::size_t n, std::uint64_t seed) {
  std::vector<ComplexImage> out;
  for (std::size_t i = 0; i < nc; ++i) out.push_back(random_image(m, n, seed * 1000 + i));
  return CoilSet(std::move(out));
}

/// Bernoulli mask with the DC cell forced on so it is never empty.
inline SamplingMask random_mask(std::size_t m, std::size_t n, std::uint64_t seed, double keep = 0.5) {
  Rng rng(seed);
  std::vector<std::uint8_t> cells(m * n);
  for (auto &c : cells) c = rng.uniform() < keep ? 1 : 0;
  cells[0] = 1;
  return {m, n, std::move(cells), 1.0 / keep, MaskKind::random, seed};
}

inline ReconParams params(double mu, double lambda, double gamma, int levels = 1) {
  ReconParams p;
  p.mu = mu;
  p.lambda = lambda;
  p.gamma = gamma;
  p.wavelet_levels = levels;
  return p;
}

inline double max_abs_diff(const ComplexImage &a, const ComplexImage &b) {
  a.require_same(b);
  double d = 0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

using Mat = Eigen::MatrixXcd;

/// Periodic backward difference along the row index, from the definition.
inline Mat dense_dx(std::size_t m, std::size_t n) {
  const auto N = static_cast<Eigen::Index>(m * n);
  Mat D = Mat::Zero(N, N);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto row = static_cast<Eigen::Index>(i * n + j);
      D(row, row) += 1.0;
      D(row, static_cast<Eigen::Index>(((i + m - 1) % m) * n + j)) -= 1.0;
    }
  }
  return D;
}

inline Mat dense_dy(std::size_t m, std::size_t n) {
  const auto N = static_cast<Eigen::Index>(m * n);
  Mat D = Mat::Zero(N, N);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto row = static_cast<Eigen::Index>(i * n + j);
      D(row, row) += 1.0;
      D(row, static_cast<Eigen::Index>(i * n + (j + n - 1) % n)) -= 1.0;
    }
  }
  return D;
}

inline Mat dense_diag(const ComplexImage &img) { return oracle::to_vector(img).asDiagonal(); }

/// R F S_i for coil i.
inline Mat dense_encoding(const CoilSet &sens, const SamplingMask &mask, std::size_t i) {
  return dense_diag(mask.as_image()) * oracle::dense_dft(mask.rows(), mask.cols()) * dense_diag(sens[i]);
}

/// mu sum_i (R F S_i)^H R F S_i + lambda (Dx^H Dx + Dy^H Dy) + gamma I.
inline Mat dense_system(const CoilSet &sens, const SamplingMask &mask, const ReconParams &p) {
  const std::size_t m = mask.rows(), n = mask.cols();
  const auto N = static_cast<Eigen::Index>(m * n);
  Mat A = p.gamma * Mat::Identity(N, N);
  for (std::size_t i = 0; i < sens.ncoils(); ++i) {
    const Mat E = dense_encoding(sens, mask, i);
    A += p.mu * E.adjoint() * E;
  }
  const Mat Dx = dense_dx(m, n), Dy = dense_dy(m, n);
  A += p.lambda * (Dx.adjoint() * Dx + Dy.adjoint() * Dy);
  return A;
}

inline ComplexImage apply_dense(const Mat &M, const ComplexImage &x) {
  return oracle::to_image(M * oracle::to_vector(x), x.rows(), x.cols());
}

} // namespace sbp::testing
