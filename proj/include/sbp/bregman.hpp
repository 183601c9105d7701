#pragma once

// Split Bregman iteration for
//   min mu/2 sum ||R F S_i x - y_i||^2 + lambda/2 (|D_x x|_1 + |D_y x|_1) + gamma/2 |W x|_1
// with the l2 subproblem solved by (preconditioned) CG.

#include <chrono>
#include <cmath>
#include <optional>
#include <string_view>

#include "sbp/encoding.hpp"
#include "sbp/pcg.hpp"
#include "sbp/precond.hpp"

namespace sbp {

enum class PrecondKind { none, jacobi, circulant };

inline std::string_view to_string(PrecondKind k) {
  switch (k) {
  case PrecondKind::none: return "none";
  case PrecondKind::jacobi: return "jacobi";
  case PrecondKind::circulant: return "circulant";
  }
  return "?";
}

inline PrecondKind parse_precond(std::string_view s) {
  if (s == "none") return PrecondKind::none;
  if (s == "jacobi") return PrecondKind::jacobi;
  if (s == "circulant") return PrecondKind::circulant;
  throw Error(Errc::config_invalid, "unknown preconditioner '" + std::string(s) + "'");
}

/// Complex soft threshold z max(|z| - t, 0) / |z|, with 0 -> 0.
inline ComplexImage shrink(const ComplexImage &z, double t) {
  if (t < 0) throw Error(Errc::invalid_argument, "shrink threshold must be nonnegative");
  ComplexImage out(z.rows(), z.cols());
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double mag = std::abs(z[k]);
    if (mag > t) out[k] = z[k] * ((mag - t) / mag);
  }
  return out;
}

struct BregmanState {
  ComplexImage x;
  SplitVariables aux;
  CoilSet y;         // y_i^[j], fed back every outer iteration
  CoilSet y_initial; // y_i^[1]
};

inline void require_data_shape(const CoilSet &y, const EncodingContext &ctx) {
  if (y.ncoils() != ctx.ncoils() || y.rows() != ctx.rows() || y.cols() != ctx.cols()) {
    throw Error(Errc::dimension_mismatch, "k-space data does not match the encoding context");
  }
}

/// Root-sum-of-squares of the zero-filled coil images (real valued).
inline ComplexImage root_sum_of_squares(const CoilSet &y) {
  ComplexImage acc(y.rows(), y.cols());
  for (const auto &yi : y) {
    const ComplexImage img = ifft2(yi);
    for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += std::norm(img[p]);
  }
  for (auto &v : acc) v = std::sqrt(v.real());
  return acc;
}

inline BregmanState init_state(const CoilSet &y, const EncodingContext &ctx) {
  require_data_shape(y, ctx);
  return {root_sum_of_squares(y), SplitVariables(ctx.rows(), ctx.cols()), y, y};
}

/// sum_i ||R F S_i x - y_i||^2
inline double data_residual(const ComplexImage &x, const CoilSet &y, const EncodingContext &ctx) {
  double acc = 0.0;
  for (std::size_t i = 0; i < ctx.ncoils(); ++i) {
    const ComplexImage diff = forward_coil(x, ctx, i) - y[i];
    for (const auto &v : diff) acc += std::norm(v);
  }
  return acc;
}

struct ReconResult {
  ComplexImage image;
  ConvergenceLog log;
  std::vector<double> data_residuals; // after each outer iteration
};

namespace detail {
using clock = std::chrono::steady_clock;
inline double seconds_since(clock::time_point t0) {
  return std::chrono::duration<double>(clock::now() - t0).count();
}
} // namespace detail

/// Runs n_outer x n_inner Split Bregman iterations. The preconditioner is
/// built once up front; each solve is warm-started from the current x.
inline ReconResult run(const CoilSet &y, const EncodingContext &ctx, PrecondKind kind) {
  const auto &p = ctx.params();
  BregmanState st = init_state(y, ctx);
  ReconResult out;

  std::optional<CirculantPreconditioner> circ;
  std::optional<JacobiPreconditioner> jac;
  {
    const auto t0 = detail::clock::now();
    if (kind == PrecondKind::circulant) circ.emplace(build_circulant(ctx));
    if (kind == PrecondKind::jacobi) jac.emplace(build_jacobi(ctx));
    out.log.preconditioner_build_seconds = kind == PrecondKind::none ? 0.0 : detail::seconds_since(t0);
  }

  const auto apply_a = [&ctx](const ComplexImage &v) { return apply_A(v, ctx); };
  const auto solve = [&](const ComplexImage &b, const ComplexImage &x0) {
    switch (kind) {
    case PrecondKind::circulant: return pcg(apply_a, b, x0, *circ, p.epsilon, p.max_pcg_iters);
    case PrecondKind::jacobi: return pcg(apply_a, b, x0, *jac, p.epsilon, p.max_pcg_iters);
    case PrecondKind::none: break;
    }
    return cg(apply_a, b, x0, p.epsilon, p.max_pcg_iters);
  };

  for (int j = 1; j <= p.n_outer; ++j) {
    OuterRecord rec;
    rec.outer = j;
    for (int k = 1; k <= p.n_inner; ++k) {
      auto t0 = detail::clock::now();
      const ComplexImage b = build_rhs(st.y, st.aux, ctx);
      rec.rhs_seconds += detail::seconds_since(t0);

      t0 = detail::clock::now();
      PcgResult sol = solve(b, st.x);
      rec.pcg_seconds += detail::seconds_since(t0);
      st.x = std::move(sol.solution);
      rec.pcg_iterations += sol.iterations;
      rec.final_relres = sol.relative_residuals.back();
      out.log.solves.push_back(
          {j, k, sol.iterations, !sol.converged, std::move(sol.relative_residuals)});

      t0 = detail::clock::now();
      auto &a = st.aux;
      if (p.lambda > 0.0) {
        const double t = 1.0 / p.lambda;
        const ComplexImage gx = dx(st.x);
        a.d_x = shrink(gx + a.b_x, t);
        a.b_x += gx;
        a.b_x -= a.d_x;
        const ComplexImage gy = dy(st.x);
        a.d_y = shrink(gy + a.b_y, t);
        a.b_y += gy;
        a.b_y -= a.d_y;
      }
      if (p.gamma > 0.0) {
        const ComplexImage wx = dwt2(st.x, ctx.wavelet());
        a.d_w = shrink(wx + a.b_w, 1.0 / p.gamma);
        a.b_w += wx;
        a.b_w -= a.d_w;
      }
      rec.shrink_seconds += detail::seconds_since(t0);
    }

    const auto t0 = detail::clock::now();
    double resid = 0.0;
    for (std::size_t i = 0; i < ctx.ncoils(); ++i) {
      const ComplexImage ax = forward_coil(st.x, ctx, i);
      ComplexImage &yi = st.y[i];
      const ComplexImage &y1 = st.y_initial[i];
      for (std::size_t q = 0; q < yi.size(); ++q) {
        const cplx d = y1[q] - ax[q];
        yi[q] += d;
        resid += std::norm(d);
      }
    }
    rec.feedback_seconds = detail::seconds_since(t0);
    out.data_residuals.push_back(resid);
    out.log.outer.push_back(rec);
  }
  out.image = std::move(st.x);
  return out;
}

} // namespace sbp
