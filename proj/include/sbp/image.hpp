#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sbp/error.hpp"

namespace sbp {

using cplx = std::complex<double>;

/// An m x n grid of complex doubles stored row-major. Index (i, j) is row i
/// (the x / foot-head direction, the one D_x differences along) and column j.
class ComplexImage {
public:
  ComplexImage() = default;

  ComplexImage(std::size_t rows, std::size_t cols, cplx fill = {0.0, 0.0})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) {
      throw Error(Errc::dimension_mismatch, "image dimensions must be positive");
    }
  }

  ComplexImage(std::size_t rows, std::size_t cols, std::vector<cplx> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) {
      throw Error(Errc::dimension_mismatch, "image dimensions must be positive");
    }
    if (data_.size() != rows * cols) {
      throw Error(Errc::dimension_mismatch,
                  "declared " + std::to_string(rows) + "x" + std::to_string(cols) + " but got " +
                      std::to_string(data_.size()) + " values");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool same_shape(const ComplexImage &o) const noexcept {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  cplx &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx &operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  cplx &operator[](std::size_t k) { return data_[k]; }
  const cplx &operator[](std::size_t k) const { return data_[k]; }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }
  const std::vector<cplx> &values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  ComplexImage &operator+=(const ComplexImage &o) {
    require_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  ComplexImage &operator-=(const ComplexImage &o) {
    require_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  ComplexImage &operator*=(cplx s) {
    for (auto &v : data_) v *= s;
    return *this;
  }

  void require_same(const ComplexImage &o) const {
    if (!same_shape(o)) {
      throw Error(Errc::dimension_mismatch, std::to_string(rows_) + "x" + std::to_string(cols_) +
                                                " vs " + std::to_string(o.rows_) + "x" +
                                                std::to_string(o.cols_));
    }
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

inline ComplexImage operator+(ComplexImage a, const ComplexImage &b) { return a += b; }
inline ComplexImage operator-(ComplexImage a, const ComplexImage &b) { return a -= b; }
inline ComplexImage operator*(cplx s, ComplexImage a) { return a *= s; }

/// Elementwise product.
inline ComplexImage hadamard(const ComplexImage &a, const ComplexImage &b) {
  a.require_same(b);
  ComplexImage out(a.rows(), a.cols());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

inline ComplexImage conj(const ComplexImage &a) {
  ComplexImage out = a;
  for (auto &v : out) v = std::conj(v);
  return out;
}

/// <u, v> = sum conj(u) v, reduced sequentially in index order.
inline cplx dot(const ComplexImage &u, const ComplexImage &v) {
  u.require_same(v);
  cplx acc{0.0, 0.0};
  for (std::size_t k = 0; k < u.size(); ++k) acc += std::conj(u[k]) * v[k];
  return acc;
}

inline double norm2(const ComplexImage &u) {
  double acc = 0.0;
  for (const auto &v : u) acc += std::norm(v);
  return std::sqrt(acc);
}

inline double max_abs(const ComplexImage &u) {
  double m = 0.0;
  for (const auto &v : u) m = std::max(m, std::abs(v));
  return m;
}

/// ||a - b|| / ||b||; returns ||a|| when b is zero.
inline double relative_l2(const ComplexImage &a, const ComplexImage &b) {
  const double nb = norm2(b);
  const double nd = norm2(a - b);
  return nb > 0.0 ? nd / nb : nd;
}

/// y += alpha * x
inline void axpy(cplx alpha, const ComplexImage &x, ComplexImage &y) {
  y.require_same(x);
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

/// Checks the ComplexImage invariants on raw data. Returns nothing when they
/// hold, otherwise the first violation (naming the offending index).
inline std::optional<Error> validate(std::size_t rows, std::size_t cols,
                                     std::span<const cplx> data) {
  if (rows == 0 || cols == 0 || data.size() != rows * cols) {
    return Error(Errc::dimension_mismatch, "declared " + std::to_string(rows) + "x" +
                                               std::to_string(cols) + " with " +
                                               std::to_string(data.size()) + " values");
  }
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (!std::isfinite(data[k].real()) || !std::isfinite(data[k].imag())) {
      return Error(Errc::non_finite_value, "at index " + std::to_string(k) + " (row " +
                                               std::to_string(k / cols) + ", col " +
                                               std::to_string(k % cols) + ")");
    }
  }
  return std::nullopt;
}

inline std::optional<Error> validate(const ComplexImage &img) {
  return validate(img.rows(), img.cols(), img.data());
}

/// N_c images of identical shape.
class CoilSet {
public:
  CoilSet() = default;

  explicit CoilSet(std::vector<ComplexImage> images) : images_(std::move(images)) {
    if (images_.empty()) {
      throw Error(Errc::dimension_mismatch, "a coil set needs at least one coil");
    }
    for (std::size_t i = 1; i < images_.size(); ++i) {
      if (!images_[i].same_shape(images_[0])) {
        throw Error(Errc::dimension_mismatch, "coil " + std::to_string(i) +
                                                  " does not match the shape of coil 0");
      }
    }
  }

  CoilSet(std::size_t ncoils, std::size_t rows, std::size_t cols)
      : CoilSet(std::vector<ComplexImage>(ncoils, ComplexImage(rows, cols))) {}

  std::size_t ncoils() const noexcept { return images_.size(); }
  std::size_t rows() const { return images_.at(0).rows(); }
  std::size_t cols() const { return images_.at(0).cols(); }

  const ComplexImage &operator[](std::size_t i) const { return images_[i]; }
  // Writers must keep the shape; set() is the checked alternative.
  ComplexImage &operator[](std::size_t i) { return images_[i]; }
  void set(std::size_t i, ComplexImage img) {
    img.require_same(images_.at(0));
    images_.at(i) = std::move(img);
  }

  const std::vector<ComplexImage> &images() const noexcept { return images_; }
  auto begin() const noexcept { return images_.begin(); }
  auto end() const noexcept { return images_.end(); }

  bool same_shape(const ComplexImage &img) const { return images_.at(0).same_shape(img); }

private:
  std::vector<ComplexImage> images_;
};

enum class MaskKind { cartesian_lines, random };

inline std::string_view to_string(MaskKind k) {
  return k == MaskKind::cartesian_lines ? "cartesian" : "random";
}

/// Binary k-space sampling pattern: the diagonal r of R, with DC at (0, 0).
class SamplingMask {
public:
  SamplingMask(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> cells,
               double target_r = 1.0, MaskKind kind = MaskKind::cartesian_lines,
               std::uint64_t seed = 0)
      : rows_(rows), cols_(cols), cells_(std::move(cells)), target_r_(target_r), kind_(kind),
        seed_(seed) {
    if (rows == 0 || cols == 0 || cells_.size() != rows * cols) {
      throw Error(Errc::dimension_mismatch, "mask cell count does not match its dimensions");
    }
    std::size_t count = 0;
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      if (cells_[k] > 1) {
        throw Error(Errc::invalid_argument, "mask cell " + std::to_string(k) + " is not 0 or 1");
      }
      count += cells_[k];
    }
    if (count == 0) throw Error(Errc::invalid_argument, "mask samples nothing");
    if (!(target_r > 0.0)) throw Error(Errc::invalid_argument, "target R must be positive");
    sampled_ = count;
  }

  static SamplingMask full(std::size_t rows, std::size_t cols) {
    return {rows, cols, std::vector<std::uint8_t>(rows * cols, 1)};
  }

  /// Builds a mask from a real-valued image (anything > 0.5 counts as sampled).
  static SamplingMask from_image(const ComplexImage &img, double target_r = 1.0,
                                 MaskKind kind = MaskKind::cartesian_lines) {
    std::vector<std::uint8_t> cells(img.size());
    for (std::size_t k = 0; k < img.size(); ++k) {
      const double v = img[k].real();
      if (img[k].imag() != 0.0 || (v != 0.0 && v != 1.0)) {
        throw Error(Errc::invalid_argument, "mask value at " + std::to_string(k) + " is not 0/1");
      }
      cells[k] = v == 1.0 ? 1 : 0;
    }
    return {img.rows(), img.cols(), std::move(cells), target_r, kind};
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return cells_.size(); }
  std::uint8_t operator[](std::size_t k) const { return cells_[k]; }
  std::uint8_t operator()(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j]; }
  std::span<const std::uint8_t> cells() const noexcept { return cells_; }
  double target_r() const noexcept { return target_r_; }
  MaskKind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t sampled() const noexcept { return sampled_; }
  double sampled_fraction() const noexcept {
    return static_cast<double>(sampled_) / static_cast<double>(cells_.size());
  }
  double achieved_r() const noexcept {
    return static_cast<double>(cells_.size()) / static_cast<double>(sampled_);
  }

  ComplexImage as_image() const {
    ComplexImage img(rows_, cols_);
    for (std::size_t k = 0; k < cells_.size(); ++k) img[k] = cells_[k];
    return img;
  }

  bool operator==(const SamplingMask &o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && cells_ == o.cells_;
  }

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint8_t> cells_;
  double target_r_;
  MaskKind kind_;
  std::uint64_t seed_;
  std::size_t sampled_ = 0;
};

/// Weights and loop settings of the reconstruction.
struct ReconParams {
  double mu = 1e-3;
  double lambda = 4e-3;
  double gamma = 1e-3;
  int n_outer = 20;
  int n_inner = 1;
  double epsilon = 1e-3;
  int max_pcg_iters = 1000;
  int wavelet_levels = 4;

  /// The three published regularization sets (1, 2, 3).
  static ReconParams preset(int set) {
    ReconParams p;
    switch (set) {
    case 1: break;
    case 2: p.mu = 1e-2; break;
    case 3: p.gamma = 4e-3; break;
    default:
      throw Error(Errc::config_invalid, "regularization set must be 1, 2 or 3");
    }
    return p;
  }

  void check() const {
    if (mu < 0 || lambda < 0 || gamma < 0 || !(mu + lambda + gamma > 0)) {
      throw Error(Errc::invalid_argument, "weights must be nonnegative with a positive sum");
    }
    if (!(epsilon > 0 && epsilon < 1)) {
      throw Error(Errc::invalid_argument, "epsilon must lie in (0, 1)");
    }
    if (n_outer < 1 || n_inner < 1 || max_pcg_iters < 1 || wavelet_levels < 1) {
      throw Error(Errc::invalid_argument, "loop counts and wavelet levels must be positive");
    }
  }
};

/// One PCG solve inside a Bregman iteration.
struct SolveRecord {
  int outer = 0;
  int inner = 0;
  int pcg_iterations = 0;
  bool hit_max_iters = false;
  std::vector<double> relative_residuals;
};

struct OuterRecord {
  int outer = 0;
  int pcg_iterations = 0; // summed over the inner solves
  double final_relres = 0.0;
  double rhs_seconds = 0.0;
  double pcg_seconds = 0.0;
  double shrink_seconds = 0.0;
  double feedback_seconds = 0.0;
};

struct ConvergenceLog {
  std::vector<OuterRecord> outer;
  std::vector<SolveRecord> solves;
  double preconditioner_build_seconds = 0.0;

  int total_pcg_iterations() const {
    int total = 0;
    for (const auto &o : outer) total += o.pcg_iterations;
    return total;
  }
  double total_pcg_seconds() const {
    double t = 0;
    for (const auto &o : outer) t += o.pcg_seconds;
    return t;
  }
  double total_seconds() const {
    double t = preconditioner_build_seconds;
    for (const auto &o : outer) t += o.rhs_seconds + o.pcg_seconds + o.shrink_seconds + o.feedback_seconds;
    return t;
  }
};

} // namespace sbp
