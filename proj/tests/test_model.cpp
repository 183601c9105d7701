#include <cmath>
#include <filesystem>
#include <limits>

#include "helpers.hpp"

using namespace sbp;
using sbp::testing::random_image;

namespace {

Errc code_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an sbp::Error";
  return Errc::invalid_argument;
}

std::filesystem::path temp_path(const std::string &name) {
  return std::filesystem::temp_directory_path() / ("sbp_test_" + name);
}

} // namespace

TEST(Validate, FiniteTwoByTwoIsOk) {
  const ComplexImage img(2, 2, std::vector<cplx>{{1, 2}, {3, 4}, {-1, 0}, {0, 0.5}});
  EXPECT_FALSE(validate(img).has_value());
}

TEST(Validate, NanComponentIsRejected) {
  std::vector<cplx> data(4, cplx{1, 1});
  data[2] = {1.0, std::numeric_limits<double>::quiet_NaN()};
  const auto err = validate(2, 2, data);
  ASSERT_TRUE(err.has_value());
  EXPECT_EQ(err->code(), Errc::non_finite_value);
}

TEST(Validate, LengthMustMatchDeclaredShape) {
  const std::vector<cplx> data(15);
  const auto err = validate(4, 4, data);
  ASSERT_TRUE(err.has_value());
  EXPECT_EQ(err->code(), Errc::dimension_mismatch);
  EXPECT_EQ(code_of([&] { ComplexImage(4, 4, data); }), Errc::dimension_mismatch);
}

TEST(CoilSetShape, RaggedSetsAreRejected) {
  EXPECT_EQ(code_of([] { CoilSet({ComplexImage(4, 4), ComplexImage(4, 5)}); }), Errc::dimension_mismatch);
  EXPECT_EQ(code_of([] { CoilSet(std::vector<ComplexImage>{}); }), Errc::dimension_mismatch);
  CoilSet c(2, 3, 3);
  EXPECT_EQ(code_of([&] { c.set(1, ComplexImage(3, 2)); }), Errc::dimension_mismatch);
}

TEST(SamplingMaskInvariants, BinaryAndNonEmpty) {
  EXPECT_EQ(code_of([] { SamplingMask(2, 2, {0, 0, 0, 0}); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([] { SamplingMask(2, 2, {0, 2, 0, 1}); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([] { SamplingMask(2, 2, {0, 1, 0}); }), Errc::dimension_mismatch);
  const SamplingMask m(2, 2, {1, 0, 0, 1});
  EXPECT_EQ(m.sampled(), 2u);
  EXPECT_DOUBLE_EQ(m.achieved_r(), 2.0);
  EXPECT_EQ(SamplingMask::from_image(m.as_image()), m);
}

TEST(ReconParamsCheck, PresetsAndRanges) {
  const auto s1 = ReconParams::preset(1);
  EXPECT_EQ(s1.mu, 1e-3);
  EXPECT_EQ(s1.lambda, 4e-3);
  EXPECT_EQ(s1.gamma, 1e-3);
  EXPECT_EQ(s1.n_outer, 20);
  EXPECT_EQ(s1.n_inner, 1);
  EXPECT_EQ(s1.epsilon, 1e-3);
  EXPECT_EQ(ReconParams::preset(2).mu, 1e-2);
  EXPECT_EQ(ReconParams::preset(3).gamma, 4e-3);
  EXPECT_EQ(code_of([] { ReconParams::preset(4); }), Errc::config_invalid);

  ReconParams p;
  p.mu = p.lambda = p.gamma = 0;
  EXPECT_EQ(code_of([&] { p.check(); }), Errc::invalid_argument);
  p = ReconParams{};
  p.epsilon = 1.0;
  EXPECT_EQ(code_of([&] { p.check(); }), Errc::invalid_argument);
}

TEST(Cimg, RoundTripPreservesEveryBit) {
  const ComplexImage img = random_image(8, 8, 11);
  const auto path = temp_path("roundtrip.cimg");
  write_cimg(img, path);
  const ComplexImage back = read_cimg_image(path);
  ASSERT_TRUE(back.same_shape(img));
  for (std::size_t k = 0; k < img.size(); ++k) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back[k].real()), std::bit_cast<std::uint64_t>(img[k].real()));
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back[k].imag()), std::bit_cast<std::uint64_t>(img[k].imag()));
  }
  EXPECT_EQ(encode_cimg(back), encode_cimg(img));
  std::filesystem::remove(path);
}

TEST(Cimg, CoilSetRoundTrip) {
  const CoilSet c = sbp::testing::random_coils(3, 4, 6, 2);
  const CoilSet back = decode_cimg(encode_cimg(c));
  ASSERT_EQ(back.ncoils(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back[i].values(), c[i].values());
}

TEST(Cimg, HeaderLayoutIsLittleEndian) {
  const auto bytes = encode_cimg(ComplexImage(2, 3, cplx{1.0, -2.0}));
  ASSERT_EQ(bytes.size(), 20u + 6 * 16);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "CIMG");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 2);
  EXPECT_EQ(bytes[12], 3);
  EXPECT_EQ(bytes[16], 1);
  // 1.0 = 0x3FF0000000000000, stored low byte first.
  EXPECT_EQ(bytes[20 + 7], 0x3F);
  EXPECT_EQ(bytes[20 + 6], 0xF0);
}

TEST(Cimg, BadMagic) {
  auto bytes = encode_cimg(random_image(2, 2, 1));
  bytes[0] = 'X';
  EXPECT_EQ(code_of([&] { decode_cimg(bytes); }), Errc::bad_magic);
}

TEST(Cimg, TruncatedPayload) {
  const auto two = encode_cimg(sbp::testing::random_coils(2, 4, 4, 3));
  auto bytes = two;
  bytes[16] = 3; // header now claims three coils
  EXPECT_EQ(code_of([&] { decode_cimg(bytes); }), Errc::truncated_payload);
  EXPECT_EQ(code_of([&] { decode_cimg({two.begin(), two.begin() + 10}); }), Errc::truncated_payload);
}

TEST(Cimg, UnsupportedVersion) {
  auto bytes = encode_cimg(random_image(2, 2, 1));
  bytes[4] = 2;
  EXPECT_EQ(code_of([&] { decode_cimg(bytes); }), Errc::version_unsupported);
}

TEST(Cimg, NonFinitePayloadIsRejected) {
  auto bytes = encode_cimg(ComplexImage(1, 1));
  const double inf = std::numeric_limits<double>::infinity();
  const auto raw = std::bit_cast<std::array<unsigned char, 8>>(inf);
  std::copy(raw.begin(), raw.end(), bytes.begin() + 20);
  EXPECT_EQ(code_of([&] { decode_cimg(bytes); }), Errc::non_finite_value);
}

TEST(Cimg, MissingFileIsAnIoError) {
  EXPECT_EQ(code_of([] { read_cimg("/nonexistent/dir/file.cimg"); }), Errc::io_error);
}

TEST(Pgm, MinMaxWindow) {
  const ComplexImage img(1, 3, std::vector<cplx>{{0, 0}, {3, 4}, {0, 10}});
  const auto bytes = encode_pgm(img);
  const std::string header = "P5\n3 1\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 3);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + static_cast<long>(header.size())), header);
  EXPECT_EQ(bytes[header.size()], 0);
  EXPECT_EQ(bytes[header.size() + 1], 128);
  EXPECT_EQ(bytes[header.size() + 2], 255);
}

TEST(ConvergenceCsv, OneRowPerOuterIteration) {
  ConvergenceLog log;
  log.outer.push_back({1, 5, 1e-4, 0, 0, 0, 0});
  log.outer.push_back({2, 3, 2e-4, 0, 0, 0, 0});
  const std::string csv = convergence_csv(log);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "outer,pcg_iters,final_relres,rhs_s,pcg_s,shrink_s,feedback_s");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(log.total_pcg_iterations(), 8);
}
