#include <gtest/gtest.h>

#include "sbp/complexity.hpp"

using namespace sbp;
using namespace sbp::complexity;

TEST(Flops, BuildCost) {
  EXPECT_EQ(flops_build_precond(1024, 12), 191488u);
  EXPECT_EQ(flops_build_precond(2, 1), 20u);
}

TEST(Flops, ApplyCosts) {
  EXPECT_EQ(flops_apply_A(1024, 12), 301056u);
  EXPECT_EQ(flops_apply_precond(1024), 21504u);
}

TEST(Flops, CoefficientsArePinned) {
  // Differences in N and Nc isolate each coefficient.
  for (std::uint64_t nc : {1u, 4u, 12u, 32u}) {
    for (std::uint64_t lg : {1u, 5u, 10u, 20u}) {
      const std::uint64_t n = std::uint64_t{1} << lg;
      EXPECT_EQ(flops_build_precond(n, nc), (3 + 2 * nc) * n + (4 + nc) * n * lg);
      EXPECT_EQ(flops_apply_A(n, nc), (6 + 4 * nc) * n + 2 * nc * n * lg);
      EXPECT_EQ(flops_apply_precond(n), n + 2 * n * lg);
    }
  }
  EXPECT_EQ(flops_build_precond(1024, 13) - flops_build_precond(1024, 12), 2u * 1024 + 1024u * 10);
  EXPECT_EQ(flops_apply_A(1024, 13) - flops_apply_A(1024, 12), 4u * 1024 + 2u * 1024 * 10);
}

TEST(Flops, Superlinear) {
  for (std::uint64_t lg = 1; lg < 30; ++lg) {
    const std::uint64_t n = std::uint64_t{1} << lg;
    EXPECT_GT(flops_build_precond(2 * n, 12), 2 * flops_build_precond(n, 12));
  }
}

TEST(Flops, RejectsBadSizes) {
  for (std::uint64_t n : {0u, 1u, 3u, 1000u}) {
    try {
      flops_apply_precond(n);
      ADD_FAILURE() << n;
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), Errc::non_power_of_two);
    }
  }
  EXPECT_THROW(flops_apply_A(1024, 0), Error);
}

TEST(CostCurve, CombinedAndOrdering) {
  const auto curve = cost_ratio_curve(12, power_of_two_sizes(10, 24));
  ASSERT_EQ(curve.size(), 15u);
  for (const auto &p : curve) {
    EXPECT_EQ(p.flops_combined, p.flops_m + p.flops_a);
    EXPECT_LT(p.flops_m, p.flops_a);
    EXPECT_LT(p.flops_a, p.flops_combined);
  }
  const auto at = cost_ratio_curve(12, {512u * 512u}).front();
  EXPECT_LT(at.flops_m, at.flops_a);
}

// With these cost formulas the ratio M/A = (1 + 2 log N) / (54 + 24 log N) at
// Nc = 12 rises toward 1/12 from below.
TEST(CostCurve, RatioApproachesOneOverNcFromBelow) {
  for (std::uint64_t nc : {2u, 8u, 12u, 32u}) {
    const auto curve = cost_ratio_curve(nc, power_of_two_sizes(1, 40));
    for (std::size_t k = 0; k < curve.size(); ++k) {
      EXPECT_LT(curve[k].ratio(), 1.0 / static_cast<double>(nc));
      if (k > 0) EXPECT_GT(curve[k].ratio(), curve[k - 1].ratio());
    }
    const double gap_first = 1.0 / nc - curve.front().ratio();
    const double gap_last = 1.0 / nc - curve.back().ratio();
    EXPECT_LT(gap_last, 0.5 * gap_first);
  }
  const auto p = cost_ratio_curve(12, {std::uint64_t{1} << 20}).front();
  EXPECT_NEAR(p.ratio(), 41.0 / 534.0, 1e-15);
}

TEST(CostCurve, Csv) {
  const std::string csv = curve_csv(cost_ratio_curve(12, {1024, 2048}));
  EXPECT_EQ(csv, "N,flops_M,flops_A,flops_combined\n1024,21504,301056,322560\n2048,47104,651264,698368\n");
}
