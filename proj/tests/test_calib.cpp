#include <numbers>

#include "helpers.hpp"

using namespace sbp;
using namespace sbp::testing;

namespace {

PhantomSpec spec(std::size_t s, PhantomKind kind = PhantomKind::shepp_logan) {
  PhantomSpec ps;
  ps.kind = kind;
  ps.rows = ps.cols = s;
  return ps;
}

Support full_support(std::size_t m, std::size_t n) { return {m, n, std::vector<std::uint8_t>(m * n, 1)}; }

} // namespace

TEST(Phantom, DeterministicAndNormalized) {
  for (auto kind : {PhantomKind::shepp_logan, PhantomKind::blobs}) {
    const ComplexImage a = make_phantom(spec(64, kind)), b = make_phantom(spec(64, kind));
    EXPECT_EQ(a.values(), b.values());
    EXPECT_DOUBLE_EQ(max_abs(a), 1.0);
    for (const auto &v : a) EXPECT_GE(v.real(), 0.0);
  }
}

TEST(Phantom, ZeroOutsideTheHead) {
  const ComplexImage a = make_phantom(spec(64));
  EXPECT_EQ(a(0, 0), cplx(0));
  EXPECT_EQ(a(0, 32), cplx(0));
  EXPECT_EQ(a(32, 0), cplx(0));
  EXPECT_EQ(a(63, 63), cplx(0));
  EXPECT_GT(std::abs(a(32, 32)), 0.0);
}

TEST(Phantom, NoiseStaysInRangeAndFollowsSeed) {
  PhantomSpec ps = spec(32);
  ps.noise_std = 0.05;
  ps.seed = 3;
  const ComplexImage a = make_phantom(ps), b = make_phantom(ps);
  EXPECT_EQ(a.values(), b.values());
  EXPECT_LE(max_abs(a), 1.0 + 1e-15);
  ps.seed = 4;
  EXPECT_NE(make_phantom(ps).values(), a.values());
}

TEST(Coils, WideSingleCoilIsNearlyUniform) {
  CoilSimSpec cs;
  cs.ncoils = 1;
  cs.gaussian_width = 1e4;
  const CoilSet c = simulate_coils(cs, 32, 32);
  double lo = 1e300, hi = 0;
  for (const auto &v : c[0]) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  EXPECT_GT(lo / hi, 0.9999);
}

TEST(Coils, RingIsRotationallySymmetric) {
  CoilSimSpec cs;
  cs.ncoils = 8;
  const auto geo = coil_geometry(cs);
  for (std::size_t c = 0; c < 8; ++c) {
    const double angle = std::atan2(geo[c].cy, geo[c].cx);
    const double expect = std::remainder(std::numbers::pi / 4 * static_cast<double>(c), 2 * std::numbers::pi);
    EXPECT_NEAR(std::remainder(angle - expect, 2 * std::numbers::pi), 0.0, 1e-12);
    EXPECT_NEAR(std::hypot(geo[c].cx, geo[c].cy), std::hypot(geo[0].cx, geo[0].cy), 1e-12);
  }
  // Two steps of 45 degrees is a quarter turn of the magnitude profile.
  const std::size_t n = 32;
  const CoilSet s = simulate_coils(cs, n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(std::abs(s[2](n - 1 - j, i)), std::abs(s[0](i, j)), 1e-12);
  }
}

TEST(Coils, DeterministicAndCoverTheSupport) {
  CoilSimSpec cs;
  cs.seed = 9;
  const CoilSet a = simulate_coils(cs, 64, 64), b = simulate_coils(cs, 64, 64);
  for (std::size_t i = 0; i < a.ncoils(); ++i) EXPECT_EQ(a[i].values(), b[i].values());
  const ComplexImage sos = sum_of_squares(a);
  const Support sup = support_from_image(make_phantom(spec(64)), cs.support_threshold);
  EXPECT_GT(sup.count(), 0u);
  for (std::size_t k = 0; k < sos.size(); ++k) {
    if (sup.inside[k]) EXPECT_GT(sos[k].real(), 0.0);
  }
  cs.layout = CoilLayout::linear_posterior;
  EXPECT_EQ(simulate_coils(cs, 16, 16).ncoils(), 12u);
  cs.ncoils = 0;
  EXPECT_THROW(simulate_coils(cs, 16, 16), Error);
}

TEST(Support, FillsEnclosedHoles) {
  ComplexImage ring(9, 9);
  for (std::size_t i = 2; i <= 6; ++i) {
    for (std::size_t j = 2; j <= 6; ++j) {
      if (i == 2 || i == 6 || j == 2 || j == 6) ring(i, j) = 1.0;
    }
  }
  const Support sup = support_from_image(ring, 0.5);
  EXPECT_EQ(sup.count(), 25u);
  EXPECT_EQ(sup.inside[4 * 9 + 4], 1);
  EXPECT_EQ(sup.inside[0], 0);
}

TEST(NormalizeSensitivities, ConstantTwoInsideSupport) {
  Support sup{4, 4, std::vector<std::uint8_t>(16, 0)};
  sup.inside[5] = sup.inside[6] = 1;
  const CoilSet out = normalize_sensitivities(CoilSet({ComplexImage(4, 4, cplx{2, 0})}), sup);
  for (std::size_t k = 0; k < 16; ++k) EXPECT_EQ(std::abs(out[0][k]), sup.inside[k] ? 1.0 : 0.0);
}

TEST(NormalizeSensitivities, UnitSumOfSquaresAndPhase) {
  const CoilSet raw = random_coils(4, 8, 8, 7);
  Support sup = full_support(8, 8);
  sup.inside[0] = 0;
  const CoilSet out = normalize_sensitivities(raw, sup);
  const ComplexImage sos = sum_of_squares(out);
  for (std::size_t k = 0; k < sos.size(); ++k) {
    if (sup.inside[k]) {
      EXPECT_NEAR(sos[k].real(), 1.0, 1e-12);
    } else {
      EXPECT_EQ(sos[k].real(), 0.0);
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = 1; k < 64; ++k) EXPECT_NEAR(std::arg(out[i][k]), std::arg(raw[i][k]), 1e-12);
  }
}

TEST(NormalizeSensitivities, DegenerateSupport) {
  const Support empty{4, 4, std::vector<std::uint8_t>(16, 0)};
  try {
    normalize_sensitivities(random_coils(2, 4, 4, 1), empty);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::degenerate_support);
  }
  EXPECT_THROW(normalize_sensitivities(CoilSet(1, 4, 4), full_support(4, 4)), Error);
}

TEST(NormalizeSensitivities, ThresholdRule) {
  CoilSimSpec cs;
  const CoilSet out = normalize_sensitivities(simulate_coils(cs, 32, 32), 0.05);
  const ComplexImage sos = sum_of_squares(out);
  for (const auto &v : sos) EXPECT_TRUE(std::abs(v.real()) < 1e-12 || std::abs(v.real() - 1.0) < 1e-12);
}

TEST(NormalizeCoilImages, ConsistentDataIsFixed) {
  const Support sup = full_support(8, 8);
  const CoilSet sens = normalize_sensitivities(random_coils(3, 8, 8, 2), sup);
  const CoilSet m = coil_images(random_image(8, 8, 20), sens);
  const CoilSet out = normalize_coil_images(m, sens);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LT(max_abs_diff(out[i], m[i]), 1e-12);
  const CoilSet zero = normalize_coil_images(CoilSet(3, 8, 8), sens);
  for (const auto &z : zero) EXPECT_EQ(max_abs(z), 0.0);
}

TEST(NormalizeCoilImages, Idempotent) {
  Support sup = full_support(8, 8);
  sup.inside[3] = 0;
  const CoilSet sens = normalize_sensitivities(random_coils(3, 8, 8, 3), sup);
  const CoilSet once = normalize_coil_images(random_coils(3, 8, 8, 30), sens);
  const CoilSet twice = normalize_coil_images(once, sens);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LT(max_abs_diff(once[i], twice[i]), 1e-12);
  EXPECT_THROW(normalize_coil_images(random_coils(2, 8, 8, 1), sens), Error);
}

TEST(Compress, KeepAllPreservesPixelEnergy) {
  const CoilSet img = random_coils(5, 8, 8, 4), sens = random_coils(5, 8, 8, 5);
  const auto cc = coil_compress(img, sens, 5);
  const ComplexImage before = sum_of_squares(img), after = sum_of_squares(cc.images);
  EXPECT_LT(max_abs_diff(before, after), 1e-10 * max_abs(before));
  const Mat I = Mat::Identity(5, 5);
  EXPECT_LT((cc.matrix.adjoint() * cc.matrix - I).cwiseAbs().maxCoeff(), 1e-12);
  for (std::size_t k = 1; k < cc.singular_values.size(); ++k) EXPECT_GE(cc.singular_values[k - 1], cc.singular_values[k]);
}

TEST(Compress, RankOneDataConcentrates) {
  const ComplexImage profile = random_image(8, 8, 6);
  std::vector<ComplexImage> coils;
  for (cplx a : {cplx{1, 0}, cplx{0.5, 2}, cplx{-3, 1}, cplx{0, -0.2}}) coils.push_back(a * profile);
  const auto cc = coil_compress(CoilSet(coils), CoilSet(coils), 4);
  double total = 0;
  for (const auto &c : cc.images) total += std::pow(norm2(c), 2);
  EXPECT_GE(std::pow(norm2(cc.images[0]), 2) / total, 0.99999);
}

TEST(Compress, TwelveToSix) {
  CoilSimSpec cs;
  const ComplexImage x = make_phantom(spec(32));
  const CoilSet sens = normalize_sensitivities(simulate_coils(cs, 32, 32), support_from_image(x, 0.05));
  const auto cc = coil_compress(coil_images(x, sens), sens, 6);
  EXPECT_EQ(cc.images.ncoils(), 6u);
  EXPECT_EQ(cc.sens.ncoils(), 6u);
  EXPECT_EQ(cc.singular_values.size(), 12u);
  try {
    coil_compress(coil_images(x, sens), sens, 13);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::keep_out_of_range);
  }
  EXPECT_THROW(coil_compress(coil_images(x, sens), sens, 0), Error);
}

TEST(Compress, KeepAllLeavesReconstructionUnchanged) {
  ReconParams p = ReconParams::preset(1);
  p.wavelet_levels = 3;
  const ComplexImage x = [] {
    ComplexImage v = make_phantom(spec(32));
    v *= 1e4;
    return v;
  }();
  CoilSimSpec cs;
  cs.ncoils = 6;
  const CoilSet sens = normalize_sensitivities(simulate_coils(cs, 32, 32), support_from_image(x, 0.05));
  const SamplingMask mask = cartesian_vd_mask(32, 32, MaskOptions{});
  const CoilSet images = coil_images(x, sens);
  const auto cc = coil_compress(images, sens, 6);
  const ReconResult full = run(simulate_kspace(images, mask), EncodingContext(sens, mask, p), PrecondKind::circulant);
  const ReconResult virt = run(simulate_kspace(cc.images, mask), EncodingContext(cc.sens, mask, p), PrecondKind::circulant);
  EXPECT_LE(relative_l2(virt.image, full.image), 10 * p.epsilon);
}

TEST(SimulateKspace, MaskedForwardModel) {
  const CoilSet img = random_coils(2, 8, 8, 8);
  const SamplingMask mask = random_mask(8, 8, 8);
  const CoilSet y = simulate_kspace(img, mask);
  for (std::size_t i = 0; i < 2; ++i) {
    const ComplexImage full = fft2(img[i]);
    for (std::size_t k = 0; k < 64; ++k) EXPECT_EQ(y[i][k], mask[k] ? full[k] : cplx(0));
  }
}

TEST(ErrorOnSupport, IgnoresBackground) {
  ComplexImage truth(4, 4), x(4, 4);
  Support sup{4, 4, std::vector<std::uint8_t>(16, 0)};
  sup.inside[5] = 1;
  truth[5] = 2.0;
  x[5] = 1.0;
  x[0] = 100.0;
  EXPECT_DOUBLE_EQ(relative_error_on_support(x, truth, sup), 0.5);
}
