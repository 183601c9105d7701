#pragma once

// Synthetic ground truth and coil data: phantoms, simulated sensitivities,
// sensitivity / coil-image normalization and SVD coil compression.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numbers>
#include <string_view>
#include <vector>

#include "sbp/fft.hpp"
#include "sbp/image.hpp"
#include "sbp/random.hpp"

namespace sbp {

enum class PhantomKind { shepp_logan, blobs };

struct PhantomSpec {
  PhantomKind kind = PhantomKind::shepp_logan;
  std::size_t rows = 256;
  std::size_t cols = 256;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

struct Ellipse {
  double intensity, a, b, x0, y0, phi_deg;
};

// Modified Shepp-Logan (Toft's higher-contrast intensities).
inline constexpr std::array<Ellipse, 10> shepp_logan_ellipses{{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
}};

// Pixel centres mapped to [-1, 1]^2, x along columns, y up along rows.
inline double grid_x(std::size_t j, std::size_t n) {
  return -1.0 + (2.0 * static_cast<double>(j) + 1.0) / static_cast<double>(n);
}
inline double grid_y(std::size_t i, std::size_t m) {
  return 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(m);
}

} // namespace detail

/// Deterministic phantom with max magnitude 1 (before noise, and rescaled to
/// stay within [0, 1] after).
inline ComplexImage make_phantom(const PhantomSpec &spec) {
  if (spec.rows == 0 || spec.cols == 0 || spec.noise_std < 0) {
    throw Error(Errc::invalid_argument, "invalid phantom spec");
  }
  const std::size_t m = spec.rows, n = spec.cols;
  ComplexImage img(m, n);
  Rng rng(spec.seed);

  if (spec.kind == PhantomKind::shepp_logan) {
    for (std::size_t i = 0; i < m; ++i) {
      const double y = detail::grid_y(i, m);
      for (std::size_t j = 0; j < n; ++j) {
        const double x = detail::grid_x(j, n);
        double v = 0.0;
        for (const auto &e : detail::shepp_logan_ellipses) {
          const double phi = e.phi_deg * std::numbers::pi / 180.0;
          const double xr = (x - e.x0) * std::cos(phi) + (y - e.y0) * std::sin(phi);
          const double yr = -(x - e.x0) * std::sin(phi) + (y - e.y0) * std::cos(phi);
          if (xr * xr / (e.a * e.a) + yr * yr / (e.b * e.b) <= 1.0) v += e.intensity;
        }
        img(i, j) = std::max(v, 0.0);
      }
    }
  } else {
    struct Blob {
      double x0, y0, width, amp;
    };
    std::vector<Blob> blobs(6);
    for (auto &b : blobs) {
      const double r = 0.6 * std::sqrt(rng.uniform());
      const double t = 2.0 * std::numbers::pi * rng.uniform();
      b = {r * std::cos(t), r * std::sin(t), 0.05 + 0.15 * rng.uniform(), 0.3 + 0.7 * rng.uniform()};
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double y = detail::grid_y(i, m);
      for (std::size_t j = 0; j < n; ++j) {
        const double x = detail::grid_x(j, n);
        if (x * x + y * y > 0.81) continue;
        double v = 0.0;
        for (const auto &b : blobs) {
          const double d2 = (x - b.x0) * (x - b.x0) + (y - b.y0) * (y - b.y0);
          v += b.amp * std::exp(-d2 / (2.0 * b.width * b.width));
        }
        img(i, j) = v;
      }
    }
  }

  double peak = max_abs(img);
  if (peak > 0) img *= 1.0 / peak;
  if (spec.noise_std > 0) {
    const double s = spec.noise_std / std::numbers::sqrt2;
    for (auto &v : img) v += cplx{s * rng.normal(), s * rng.normal()};
    peak = max_abs(img);
    if (peak > 1.0) img *= 1.0 / peak;
  }
  return img;
}

enum class CoilLayout { ring, linear_posterior };

struct CoilSimSpec {
  std::size_t ncoils = 12;
  CoilLayout layout = CoilLayout::ring;
  double gaussian_width = 0.35;         // std. deviation as a fraction of the FOV
  double phase_gradient = std::numbers::pi; // radians across the FOV
  double support_threshold = 0.05;
  std::uint64_t seed = 0;
};

/// Coil centres in normalized [-1, 1]^2 coordinates, plus the unit direction
/// the linear phase ramps along.
struct CoilGeometry {
  double cx, cy, ux, uy;
};

inline std::vector<CoilGeometry> coil_geometry(const CoilSimSpec &spec) {
  std::vector<CoilGeometry> g;
  constexpr double radius = 1.3;
  for (std::size_t c = 0; c < spec.ncoils; ++c) {
    if (spec.layout == CoilLayout::ring) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(spec.ncoils);
      g.push_back({radius * std::cos(t), radius * std::sin(t), std::cos(t), std::sin(t)});
    } else {
      const double x = -1.0 + 2.0 * (static_cast<double>(c) + 0.5) / static_cast<double>(spec.ncoils);
      g.push_back({x, -radius, 0.0, -1.0});
    }
  }
  return g;
}

/// Gaussian-magnitude sensitivities with a linear phase ramp and a random
/// constant phase per coil.
inline CoilSet simulate_coils(const CoilSimSpec &spec, std::size_t m, std::size_t n) {
  if (spec.ncoils < 1) throw Error(Errc::invalid_argument, "ncoils must be at least 1");
  if (!(spec.gaussian_width > 0)) throw Error(Errc::invalid_argument, "gaussian width must be > 0");
  Rng rng(spec.seed);
  const double sigma = 2.0 * spec.gaussian_width; // FOV spans 2 units
  std::vector<ComplexImage> coils;
  for (const auto &geo : coil_geometry(spec)) {
    const double offset = 2.0 * std::numbers::pi * rng.uniform();
    ComplexImage s(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      const double y = detail::grid_y(i, m);
      for (std::size_t j = 0; j < n; ++j) {
        const double x = detail::grid_x(j, n);
        const double d2 = (x - geo.cx) * (x - geo.cx) + (y - geo.cy) * (y - geo.cy);
        const double mag = std::exp(-d2 / (2.0 * sigma * sigma));
        const double phase = offset + 0.5 * spec.phase_gradient * (x * geo.ux + y * geo.uy);
        s(i, j) = std::polar(mag, phase);
      }
    }
    coils.push_back(std::move(s));
  }
  return CoilSet(std::move(coils));
}

/// Binary pixel mask of the imaged subject.
struct Support {
  std::size_t rows = 0, cols = 0;
  std::vector<std::uint8_t> inside;

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
  }
};

/// Pixels with |img| > threshold * max|img|, with enclosed holes filled (a
/// dark region fully surrounded by subject is still subject).
inline Support support_from_image(const ComplexImage &img, double threshold) {
  const std::size_t m = img.rows(), n = img.cols();
  const double cut = threshold * max_abs(img);
  Support sup{m, n, std::vector<std::uint8_t>(img.size(), 0)};
  for (std::size_t k = 0; k < img.size(); ++k) sup.inside[k] = std::abs(img[k]) > cut ? 1 : 0;

  // Flood the background from the border; anything unreached is inside.
  std::vector<std::uint8_t> outside(img.size(), 0);
  std::deque<std::size_t> queue;
  const auto seed = [&](std::size_t i, std::size_t j) {
    const std::size_t k = i * n + j;
    if (!sup.inside[k] && !outside[k]) {
      outside[k] = 1;
      queue.push_back(k);
    }
  };
  for (std::size_t i = 0; i < m; ++i) {
    seed(i, 0);
    seed(i, n - 1);
  }
  for (std::size_t j = 0; j < n; ++j) {
    seed(0, j);
    seed(m - 1, j);
  }
  while (!queue.empty()) {
    const std::size_t k = queue.front();
    queue.pop_front();
    const std::size_t i = k / n, j = k % n;
    if (i > 0) seed(i - 1, j);
    if (i + 1 < m) seed(i + 1, j);
    if (j > 0) seed(i, j - 1);
    if (j + 1 < n) seed(i, j + 1);
  }
  for (std::size_t k = 0; k < img.size(); ++k) sup.inside[k] = outside[k] ? 0 : 1;
  return sup;
}

/// ||x - truth|| / ||truth|| over the support pixels only. Outside the
/// support the sensitivities vanish and the data say nothing about x.
inline double relative_error_on_support(const ComplexImage &x, const ComplexImage &truth, const Support &support) {
  x.require_same(truth);
  if (support.rows != x.rows() || support.cols != x.cols()) {
    throw Error(Errc::dimension_mismatch, "support shape differs from image");
  }
  double num = 0, den = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!support.inside[k]) continue;
    num += std::norm(x[k] - truth[k]);
    den += std::norm(truth[k]);
  }
  if (den == 0) throw Error(Errc::degenerate_support, "reference is zero on the support");
  return std::sqrt(num / den);
}

inline ComplexImage sum_of_squares(const CoilSet &coils) {
  ComplexImage acc(coils.rows(), coils.cols());
  for (const auto &c : coils) {
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += std::norm(c[k]);
  }
  return acc;
}

/// S_i <- [sum_j S_j^H S_j]^(-1/2) S_i inside the support, zero outside.
inline CoilSet normalize_sensitivities(const CoilSet &raw, const Support &support) {
  if (support.rows != raw.rows() || support.cols != raw.cols()) {
    throw Error(Errc::dimension_mismatch, "support does not match the sensitivity maps");
  }
  if (support.count() == 0) throw Error(Errc::degenerate_support, "support is empty");
  const ComplexImage sos = sum_of_squares(raw);
  ComplexImage scale(raw.rows(), raw.cols());
  for (std::size_t k = 0; k < scale.size(); ++k) {
    if (!support.inside[k]) continue;
    if (!(sos[k].real() > 0.0)) {
      throw Error(Errc::degenerate_support, "no coil sensitivity at support pixel " + std::to_string(k));
    }
    scale[k] = 1.0 / std::sqrt(sos[k].real());
  }
  std::vector<ComplexImage> out;
  for (const auto &s : raw) out.push_back(hadamard(s, scale));
  return CoilSet(std::move(out));
}

/// Threshold rule on the raw maps themselves: support = sum|s|^2 > t * max.
inline CoilSet normalize_sensitivities(const CoilSet &raw, double threshold) {
  const ComplexImage sos = sum_of_squares(raw);
  const double cut = threshold * max_abs(sos);
  Support sup{raw.rows(), raw.cols(), std::vector<std::uint8_t>(sos.size(), 0)};
  for (std::size_t k = 0; k < sos.size(); ++k) sup.inside[k] = sos[k].real() > cut ? 1 : 0;
  return normalize_sensitivities(raw, sup);
}

/// m_i <- S_i sum_j S_j^H m_j
inline CoilSet normalize_coil_images(const CoilSet &images, const CoilSet &sens) {
  if (images.ncoils() != sens.ncoils() || images.rows() != sens.rows() || images.cols() != sens.cols()) {
    throw Error(Errc::dimension_mismatch, "coil images and sensitivities do not match");
  }
  ComplexImage combined(images.rows(), images.cols());
  for (std::size_t j = 0; j < images.ncoils(); ++j) {
    for (std::size_t k = 0; k < combined.size(); ++k) combined[k] += std::conj(sens[j][k]) * images[j][k];
  }
  std::vector<ComplexImage> out;
  for (const auto &s : sens) out.push_back(hadamard(s, combined));
  return CoilSet(std::move(out));
}

/// Coil images of a known object: m_i = s_i o x.
inline CoilSet coil_images(const ComplexImage &x, const CoilSet &sens) {
  std::vector<ComplexImage> out;
  for (const auto &s : sens) out.push_back(hadamard(s, x));
  return CoilSet(std::move(out));
}

struct CompressedCoils {
  CoilSet images;
  CoilSet sens;
  std::vector<double> singular_values; // all N_c of them, descending
  Eigen::MatrixXcd matrix;             // N_c x keep
};

namespace detail {
inline Eigen::MatrixXcd stack_coils(const CoilSet &c) {
  Eigen::MatrixXcd X(static_cast<Eigen::Index>(c.rows() * c.cols()), static_cast<Eigen::Index>(c.ncoils()));
  for (std::size_t i = 0; i < c.ncoils(); ++i) {
    for (std::size_t k = 0; k < c[i].size(); ++k) {
      X(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = c[i][k];
    }
  }
  return X;
}

inline CoilSet unstack_coils(const Eigen::MatrixXcd &X, std::size_t m, std::size_t n) {
  std::vector<ComplexImage> out;
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    ComplexImage img(m, n);
    for (std::size_t k = 0; k < img.size(); ++k) img[k] = X(static_cast<Eigen::Index>(k), c);
    out.push_back(std::move(img));
  }
  return CoilSet(std::move(out));
}
} // namespace detail

/// SVD coil compression: the compression matrix is the leading `keep` right
/// singular vectors of the N x N_c coil-image matrix, applied to both the
/// images and the sensitivities.
inline CompressedCoils coil_compress(const CoilSet &images, const CoilSet &sens, std::size_t keep) {
  if (keep < 1 || keep > images.ncoils()) {
    throw Error(Errc::keep_out_of_range, "keep=" + std::to_string(keep) + " with " +
                                             std::to_string(images.ncoils()) + " coils");
  }
  if (images.ncoils() != sens.ncoils() || images.rows() != sens.rows() || images.cols() != sens.cols()) {
    throw Error(Errc::dimension_mismatch, "coil images and sensitivities do not match");
  }
  const Eigen::MatrixXcd X = detail::stack_coils(images);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(X, Eigen::ComputeThinV);
  CompressedCoils out;
  out.matrix = svd.matrixV().leftCols(static_cast<Eigen::Index>(keep));
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    out.singular_values.push_back(svd.singularValues()(k));
  }
  out.images = detail::unstack_coils(X * out.matrix, images.rows(), images.cols());
  out.sens = detail::unstack_coils(detail::stack_coils(sens) * out.matrix, sens.rows(), sens.cols());
  return out;
}

/// y_i = mask o fft2(m_i), plus complex noise on sampled cells.
inline CoilSet simulate_kspace(const CoilSet &images, const SamplingMask &mask, double noise_std = 0.0,
                               std::uint64_t seed = 0) {
  Rng rng(seed);
  const double s = noise_std / std::numbers::sqrt2;
  std::vector<ComplexImage> out;
  for (const auto &img : images) {
    ComplexImage k = fft2(img);
    for (std::size_t p = 0; p < k.size(); ++p) {
      if (!mask[p]) {
        k[p] = 0.0;
      } else if (noise_std > 0) {
        k[p] += cplx{s * rng.normal(), s * rng.normal()};
      }
    }
    out.push_back(std::move(k));
  }
  return CoilSet(std::move(out));
}

} // namespace sbp
