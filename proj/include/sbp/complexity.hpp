#pragma once

// Closed-form FLOP counts for building and applying the circulant
// preconditioner and for one application of A. log is log2.

#include <bit>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "sbp/error.hpp"

namespace sbp::complexity {

namespace detail {
inline std::uint64_t log2_exact(std::uint64_t n) {
  if (n < 2 || !std::has_single_bit(n)) {
    throw Error(Errc::non_power_of_two, "N=" + std::to_string(n) + " is not a power of two >= 2");
  }
  return static_cast<std::uint64_t>(std::countr_zero(n));
}
inline void check_coils(std::uint64_t nc) {
  if (nc < 1) throw Error(Errc::invalid_argument, "Nc must be at least 1");
}
} // namespace detail

/// (3 + 2 Nc) N + (4 + Nc) N log N
inline std::uint64_t flops_build_precond(std::uint64_t n, std::uint64_t nc) {
  detail::check_coils(nc);
  const std::uint64_t lg = detail::log2_exact(n);
  return (3 + 2 * nc) * n + (4 + nc) * n * lg;
}

/// (6 + 4 Nc) N + 2 Nc N log N
inline std::uint64_t flops_apply_A(std::uint64_t n, std::uint64_t nc) {
  detail::check_coils(nc);
  const std::uint64_t lg = detail::log2_exact(n);
  return (6 + 4 * nc) * n + 2 * nc * n * lg;
}

/// N + 2 N log N
inline std::uint64_t flops_apply_precond(std::uint64_t n) {
  const std::uint64_t lg = detail::log2_exact(n);
  return n + 2 * n * lg;
}

struct CostPoint {
  std::uint64_t n;
  std::uint64_t flops_m;
  std::uint64_t flops_a;
  std::uint64_t flops_combined;
  double ratio() const { return static_cast<double>(flops_m) / static_cast<double>(flops_a); }
};

/// Per-iteration cost of M, A and M + A over a grid of problem sizes.
inline std::vector<CostPoint> cost_ratio_curve(std::uint64_t nc, const std::vector<std::uint64_t> &sizes) {
  std::vector<CostPoint> out;
  for (std::uint64_t n : sizes) {
    const auto fm = flops_apply_precond(n);
    const auto fa = flops_apply_A(n, nc);
    out.push_back({n, fm, fa, fm + fa});
  }
  return out;
}

/// N = 2^lo ... 2^hi.
inline std::vector<std::uint64_t> power_of_two_sizes(int lo, int hi) {
  std::vector<std::uint64_t> out;
  for (int e = lo; e <= hi; ++e) out.push_back(std::uint64_t{1} << e);
  return out;
}

inline std::string curve_csv(const std::vector<CostPoint> &curve) {
  std::ostringstream os;
  os << "N,flops_M,flops_A,flops_combined\n";
  for (const auto &p : curve) os << p.n << ',' << p.flops_m << ',' << p.flops_a << ',' << p.flops_combined << '\n';
  return os.str();
}

} // namespace sbp::complexity
