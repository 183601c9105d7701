#pragma once

// CIMG binary images, convergence-log CSV and 8-bit PGM previews.
//
// CIMG layout (all little-endian):
//   "CIMG" | u32 version = 1 | u32 m | u32 n | u32 ncoils |
//   ncoils * m * n pairs of f64 (real, imag), coil-major then row-major.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sbp/image.hpp"

namespace sbp {

inline constexpr std::array<char, 4> cimg_magic{'C', 'I', 'M', 'G'};
inline constexpr std::uint32_t cimg_version = 1;

namespace detail {

inline void put_u32(std::vector<unsigned char> &out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xffu));
}

inline void put_f64(std::vector<unsigned char> &out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xffu));
}

inline std::uint32_t get_u32(const unsigned char *p) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(p[b]) << (8 * b);
  return v;
}

inline double get_f64(const unsigned char *p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

} // namespace detail

inline std::vector<unsigned char> encode_cimg(const CoilSet &coils) {
  std::vector<unsigned char> out;
  const std::size_t payload = coils.ncoils() * coils.rows() * coils.cols();
  out.reserve(20 + 16 * payload);
  out.insert(out.end(), cimg_magic.begin(), cimg_magic.end());
  detail::put_u32(out, cimg_version);
  detail::put_u32(out, static_cast<std::uint32_t>(coils.rows()));
  detail::put_u32(out, static_cast<std::uint32_t>(coils.cols()));
  detail::put_u32(out, static_cast<std::uint32_t>(coils.ncoils()));
  for (const auto &img : coils) {
    for (const auto &v : img) {
      detail::put_f64(out, v.real());
      detail::put_f64(out, v.imag());
    }
  }
  return out;
}

inline std::vector<unsigned char> encode_cimg(const ComplexImage &img) {
  return encode_cimg(CoilSet({img}));
}

/// Decodes a CIMG buffer. A single image comes back as a one-coil set.
inline CoilSet decode_cimg(const std::vector<unsigned char> &buf) {
  if (buf.size() < 4 || !std::equal(cimg_magic.begin(), cimg_magic.end(), buf.begin())) {
    throw Error(Errc::bad_magic, "not a CIMG stream");
  }
  if (buf.size() < 20) throw Error(Errc::truncated_payload, "header is incomplete");
  const std::uint32_t version = detail::get_u32(buf.data() + 4);
  if (version != cimg_version) {
    throw Error(Errc::version_unsupported, "version " + std::to_string(version));
  }
  const std::size_t m = detail::get_u32(buf.data() + 8);
  const std::size_t n = detail::get_u32(buf.data() + 12);
  const std::size_t nc = detail::get_u32(buf.data() + 16);
  if (m == 0 || n == 0 || nc == 0) {
    throw Error(Errc::dimension_mismatch, "header declares an empty image");
  }
  const std::size_t need = 20 + 16 * nc * m * n;
  if (buf.size() < need) {
    throw Error(Errc::truncated_payload, "expected " + std::to_string(need) + " bytes, have " +
                                             std::to_string(buf.size()));
  }
  std::vector<ComplexImage> images;
  images.reserve(nc);
  const unsigned char *p = buf.data() + 20;
  for (std::size_t c = 0; c < nc; ++c) {
    std::vector<cplx> data(m * n);
    for (auto &v : data) {
      v = {detail::get_f64(p), detail::get_f64(p + 8)};
      p += 16;
    }
    if (auto err = validate(m, n, data)) throw *err;
    images.emplace_back(m, n, std::move(data));
  }
  return CoilSet(std::move(images));
}

inline void write_bytes(const std::filesystem::path &path, const std::vector<unsigned char> &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io_error, "short write to " + path.string());
}

inline std::vector<unsigned char> read_bytes(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_cimg(const CoilSet &coils, const std::filesystem::path &path) {
  write_bytes(path, encode_cimg(coils));
}

inline void write_cimg(const ComplexImage &img, const std::filesystem::path &path) {
  write_bytes(path, encode_cimg(img));
}

inline CoilSet read_cimg(const std::filesystem::path &path) { return decode_cimg(read_bytes(path)); }

inline ComplexImage read_cimg_image(const std::filesystem::path &path) {
  CoilSet set = read_cimg(path);
  if (set.ncoils() != 1) {
    throw Error(Errc::dimension_mismatch,
                path.string() + " holds " + std::to_string(set.ncoils()) + " coils, expected 1");
  }
  return set[0];
}

/// Convergence log, one row per outer iteration.
inline std::string convergence_csv(const ConvergenceLog &log) {
  std::ostringstream os;
  os << "outer,pcg_iters,final_relres,rhs_s,pcg_s,shrink_s,feedback_s\n";
  os << std::setprecision(9);
  for (const auto &r : log.outer) {
    os << r.outer << ',' << r.pcg_iterations << ',' << r.final_relres << ',' << r.rhs_seconds
       << ',' << r.pcg_seconds << ',' << r.shrink_seconds << ',' << r.feedback_seconds << '\n';
  }
  return os.str();
}

inline void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(Errc::io_error, "short write to " + path.string());
}

/// Binary PGM (P5, maxval 255) of |img|, min-max windowed.
inline std::vector<unsigned char> encode_pgm(const ComplexImage &img) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto &v : img) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  const std::string header =
      "P5\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n255\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  const double span = hi - lo;
  for (const auto &v : img) {
    const double t = span > 0 ? (std::abs(v) - lo) / span : 0.0;
    out.push_back(static_cast<unsigned char>(std::clamp(std::lround(255.0 * t), 0L, 255L)));
  }
  return out;
}

inline void write_pgm(const ComplexImage &img, const std::filesystem::path &path) {
  write_bytes(path, encode_pgm(img));
}

} // namespace sbp
