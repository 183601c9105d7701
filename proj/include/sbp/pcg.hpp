#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sbp/image.hpp"

namespace sbp {

struct PcgResult {
  ComplexImage solution;
  int iterations = 0;
  std::vector<double> relative_residuals; // entry 0 is ||b - A x0|| / ||b||
  bool converged = false;
};

struct IdentityPreconditioner {
  ComplexImage operator()(const ComplexImage &r) const { return r; }
};

/// Preconditioned conjugate gradients for Hermitian positive definite A.
/// Stops once the recurrence residual satisfies ||b - A x|| / ||b|| <= eps;
/// hitting max_iters returns converged = false instead of throwing.
template <class ApplyA, class Precond>
PcgResult pcg(const ApplyA &apply_a, const ComplexImage &b, const ComplexImage &x0,
              const Precond &precond, double eps, int max_iters = 1000) {
  b.require_same(x0);
  PcgResult res;
  const double nb = norm2(b);
  if (nb == 0.0) {
    res.solution = ComplexImage(b.rows(), b.cols());
    res.relative_residuals.push_back(0.0);
    res.converged = true;
    return res;
  }

  ComplexImage x = x0;
  ComplexImage r = b - apply_a(x);
  double rel = norm2(r) / nb;
  res.relative_residuals.push_back(rel);
  if (rel <= eps) {
    res.solution = std::move(x);
    res.converged = true;
    return res;
  }

  ComplexImage z = precond(r);
  ComplexImage p = z;
  double rz = dot(r, z).real();

  for (int it = 1; it <= max_iters; ++it) {
    const ComplexImage ap = apply_a(p);
    const double pap = dot(p, ap).real();
    if (!std::isfinite(pap) || !std::isfinite(rz)) {
      throw Error(Errc::nonfinite_breakdown, "at iteration " + std::to_string(it));
    }
    if (pap <= 0.0) {
      throw Error(Errc::indefiniteness_detected,
                  "<p, Ap> = " + std::to_string(pap) + " at iteration " + std::to_string(it));
    }
    const double alpha = rz / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    rel = norm2(r) / nb;
    if (!std::isfinite(rel)) {
      throw Error(Errc::nonfinite_breakdown, "residual at iteration " + std::to_string(it));
    }
    res.relative_residuals.push_back(rel);
    res.iterations = it;
    if (rel <= eps) {
      res.converged = true;
      break;
    }
    z = precond(r);
    const double rz_next = dot(r, z).real();
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = z[k] + beta * p[k];
  }
  res.solution = std::move(x);
  return res;
}

template <class ApplyA>
PcgResult cg(const ApplyA &apply_a, const ComplexImage &b, const ComplexImage &x0, double eps,
             int max_iters = 1000) {
  return pcg(apply_a, b, x0, IdentityPreconditioner{}, eps, max_iters);
}

} // namespace sbp
