#pragma once

// SENSE encoding R F S_i, the matrix-free system operator A and the Split
// Bregman right-hand side b.

#include <string>
#include <utility>

#include "sbp/fft.hpp"
#include "sbp/image.hpp"
#include "sbp/transforms.hpp"

namespace sbp {

/// Normalized sensitivities, sampling mask and weights. Immutable.
class EncodingContext {
public:
  EncodingContext(CoilSet sens, SamplingMask mask, ReconParams params,
                  WaveletSpec wavelet = WaveletSpec::daubechies4())
      : sens_(std::move(sens)), mask_(std::move(mask)), params_(params),
        wavelet_(std::move(wavelet)) {
    if (sens_.rows() != mask_.rows() || sens_.cols() != mask_.cols()) {
      throw Error(Errc::dimension_mismatch, "sensitivities and mask differ in shape");
    }
    params_.check();
    wavelet_.levels = params_.wavelet_levels;
    wavelet_.check_dims(rows(), cols());
    mask_image_ = mask_.as_image();
  }

  const CoilSet &sens() const noexcept { return sens_; }
  const SamplingMask &mask() const noexcept { return mask_; }
  const ComplexImage &mask_image() const noexcept { return mask_image_; }
  const ReconParams &params() const noexcept { return params_; }
  const WaveletSpec &wavelet() const noexcept { return wavelet_; }
  std::size_t rows() const { return sens_.rows(); }
  std::size_t cols() const { return sens_.cols(); }
  std::size_t ncoils() const { return sens_.ncoils(); }

  /// Same data model with different weights.
  EncodingContext with_params(const ReconParams &p) const {
    return {sens_, mask_, p, wavelet_};
  }

  void require_shape(const ComplexImage &x) const {
    if (x.rows() != rows() || x.cols() != cols()) {
      throw Error(Errc::dimension_mismatch, "image is " + std::to_string(x.rows()) + "x" +
                                                std::to_string(x.cols()) + ", context is " +
                                                std::to_string(rows()) + "x" +
                                                std::to_string(cols()));
    }
  }

  void require_coil(std::size_t i) const {
    if (i >= ncoils()) {
      throw Error(Errc::coil_index_out_of_range,
                  std::to_string(i) + " not in [0, " + std::to_string(ncoils()) + ")");
    }
  }

private:
  CoilSet sens_;
  SamplingMask mask_;
  ReconParams params_;
  WaveletSpec wavelet_;
  ComplexImage mask_image_;
};

namespace detail {
inline void apply_mask(ComplexImage &k, const SamplingMask &mask) {
  for (std::size_t p = 0; p < k.size(); ++p) {
    if (!mask[p]) k[p] = 0.0;
  }
}
} // namespace detail

/// R F S_i x (coil index is zero-based).
inline ComplexImage forward_coil(const ComplexImage &x, const EncodingContext &ctx, std::size_t i) {
  ctx.require_coil(i);
  ctx.require_shape(x);
  ComplexImage k = hadamard(ctx.sens()[i], x);
  fft2_inplace(k);
  detail::apply_mask(k, ctx.mask());
  return k;
}

/// S_i^H F^H R^H y.
inline ComplexImage adjoint_coil(const ComplexImage &y, const EncodingContext &ctx, std::size_t i) {
  ctx.require_coil(i);
  ctx.require_shape(y);
  ComplexImage img = y;
  detail::apply_mask(img, ctx.mask());
  ifft2_inplace(img);
  const ComplexImage &s = ctx.sens()[i];
  for (std::size_t p = 0; p < img.size(); ++p) img[p] *= std::conj(s[p]);
  return img;
}

/// A x = mu sum_i (R F S_i)^H R F S_i x + lambda (D_x^H D_x + D_y^H D_y) x + gamma x.
/// W^H W = I, so the wavelet term is gamma x exactly. Coils are summed in
/// ascending order.
inline ComplexImage apply_A(const ComplexImage &x, const EncodingContext &ctx) {
  ctx.require_shape(x);
  const auto &p = ctx.params();
  ComplexImage out(x.rows(), x.cols());
  if (p.mu != 0.0) {
    ComplexImage work(x.rows(), x.cols());
    for (std::size_t i = 0; i < ctx.ncoils(); ++i) {
      const ComplexImage &s = ctx.sens()[i];
      for (std::size_t q = 0; q < x.size(); ++q) work[q] = s[q] * x[q];
      fft2_inplace(work);
      detail::apply_mask(work, ctx.mask());
      ifft2_inplace(work);
      for (std::size_t q = 0; q < x.size(); ++q) out[q] += std::conj(s[q]) * work[q];
    }
    out *= p.mu;
  }
  if (p.lambda != 0.0) axpy(p.lambda, tv_normal(x), out);
  if (p.gamma != 0.0) axpy(p.gamma, x, out);
  return out;
}

/// Auxiliary split variables d_*, Bregman variables b_*. The wavelet pair
/// lives in the coefficient domain.
struct SplitVariables {
  ComplexImage d_x, d_y, d_w, b_x, b_y, b_w;

  SplitVariables() = default;
  SplitVariables(std::size_t m, std::size_t n)
      : d_x(m, n), d_y(m, n), d_w(m, n), b_x(m, n), b_y(m, n), b_w(m, n) {}
};

/// b = mu sum_i (R F S_i)^H y_i + lambda [D_x^H (d_x - b_x) + D_y^H (d_y - b_y)]
///     + gamma W^H (d_w - b_w)
inline ComplexImage build_rhs(const CoilSet &y, const SplitVariables &aux, const EncodingContext &ctx) {
  if (y.ncoils() != ctx.ncoils()) {
    throw Error(Errc::dimension_mismatch, "data has " + std::to_string(y.ncoils()) +
                                              " coils, context has " +
                                              std::to_string(ctx.ncoils()));
  }
  for (const auto *img : {&y[0], &aux.d_x, &aux.d_y, &aux.d_w, &aux.b_x, &aux.b_y, &aux.b_w}) {
    ctx.require_shape(*img);
  }
  const auto &p = ctx.params();
  ComplexImage b(ctx.rows(), ctx.cols());
  if (p.mu != 0.0) {
    for (std::size_t i = 0; i < ctx.ncoils(); ++i) b += adjoint_coil(y[i], ctx, i);
    b *= p.mu;
  }
  if (p.lambda != 0.0) {
    ComplexImage tv = dx_adj(aux.d_x - aux.b_x);
    tv += dy_adj(aux.d_y - aux.b_y);
    axpy(p.lambda, tv, b);
  }
  if (p.gamma != 0.0) axpy(p.gamma, idwt2(aux.d_w - aux.b_w, ctx.wavelet()), b);
  return b;
}

} // namespace sbp
