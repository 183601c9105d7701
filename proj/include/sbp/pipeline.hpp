#pragma once

// Batch pipeline behind the command-line tool: simulate data, reconstruct,
// benchmark the three preconditioner choices and tabulate FLOP curves.

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "sbp/bregman.hpp"
#include "sbp/calib.hpp"
#include "sbp/complexity.hpp"
#include "sbp/io.hpp"
#include "sbp/sampling.hpp"

namespace sbp {

/// Everything a pipeline run depends on. Mirrors the JSON config keys.
struct Config {
  std::size_t size = 256;
  std::size_t coils = 12;
  double accel = 4.0;
  std::string mask = "cartesian";
  std::string precond = "circulant";
  int set = 1;
  int outer = 20;
  int inner = 1;
  double eps = 1e-3;
  int max_pcg_iters = 1000;
  int wavelet_levels = 4;
  std::uint64_t seed = 0;
  std::size_t keep_coils = 0; // 0 keeps every coil
  std::string out = "out";
  std::string in; // recon input directory; defaults to out

  std::string phantom = "shepp-logan";
  double signal_scale = 1e4;
  double noise = 0.0;
  double center_fraction = 0.08;
  double density_power = 3.0;
  std::string layout = "ring";
  double coil_width = 0.35;
  double phase_gradient = 3.141592653589793;
  double support_threshold = 0.05;

  std::vector<std::size_t> bench_sizes{128, 256};
  std::size_t flops_coils = 12;
  int flops_min_log2 = 10;
  int flops_max_log2 = 24;

  ReconParams params() const {
    ReconParams p = ReconParams::preset(set);
    p.n_outer = outer;
    p.n_inner = inner;
    p.epsilon = eps;
    p.max_pcg_iters = max_pcg_iters;
    p.wavelet_levels = wavelet_levels;
    return p;
  }

  MaskKind mask_kind() const {
    if (mask == "cartesian") return MaskKind::cartesian_lines;
    if (mask == "random") return MaskKind::random;
    throw Error(Errc::config_invalid, "mask must be cartesian or random, got '" + mask + "'");
  }

  void check() const {
    if (size < 2) throw Error(Errc::config_invalid, "size must be at least 2");
    if (coils < 1) throw Error(Errc::config_invalid, "coils must be at least 1");
    if (keep_coils > coils) throw Error(Errc::config_invalid, "keep-coils exceeds coils");
    if (!(accel >= 1.0)) throw Error(Errc::config_invalid, "accel must be >= 1");
    if (!(signal_scale > 0)) throw Error(Errc::config_invalid, "signal_scale must be positive");
    if (phantom != "shepp-logan" && phantom != "blobs") {
      throw Error(Errc::config_invalid, "phantom must be shepp-logan or blobs");
    }
    if (layout != "ring" && layout != "linear-posterior") {
      throw Error(Errc::config_invalid, "layout must be ring or linear-posterior");
    }
    (void)mask_kind();
    (void)parse_precond(precond);
    try {
      params().check();
    } catch (const Error &e) {
      throw Error(Errc::config_invalid, e.what());
    }
  }
};

inline void from_json(const nlohmann::json &j, Config &c) {
  const auto get = [&](const char *key, auto &field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("size", c.size);
  get("coils", c.coils);
  get("accel", c.accel);
  get("mask", c.mask);
  get("precond", c.precond);
  get("set", c.set);
  get("outer", c.outer);
  get("inner", c.inner);
  get("eps", c.eps);
  get("max_pcg_iters", c.max_pcg_iters);
  get("wavelet_levels", c.wavelet_levels);
  get("seed", c.seed);
  get("keep_coils", c.keep_coils);
  get("out", c.out);
  get("in", c.in);
  get("phantom", c.phantom);
  get("signal_scale", c.signal_scale);
  get("noise", c.noise);
  get("center_fraction", c.center_fraction);
  get("density_power", c.density_power);
  get("layout", c.layout);
  get("coil_width", c.coil_width);
  get("phase_gradient", c.phase_gradient);
  get("support_threshold", c.support_threshold);
  get("bench_sizes", c.bench_sizes);
  get("flops_coils", c.flops_coils);
  get("flops_min_log2", c.flops_min_log2);
  get("flops_max_log2", c.flops_max_log2);
}

inline Config load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open config " + path.string());
  try {
    return nlohmann::json::parse(in).get<Config>();
  } catch (const nlohmann::json::exception &e) {
    throw Error(Errc::config_invalid, std::string(path.string()) + ": " + e.what());
  }
}

/// Fully simulated acquisition: ground truth, sensitivities and k-space on
/// the same (possibly compressed) coil basis.
struct SimulatedData {
  ComplexImage phantom; // scaled ground truth
  CoilSet sens;         // normalized (and compressed, if requested)
  CoilSet kspace;
  SamplingMask mask;
  Support support; // subject support the sensitivities were normalized on
};

inline SimulatedData simulate(const Config &cfg) {
  cfg.check();
  const std::size_t m = cfg.size, n = cfg.size;
  PhantomSpec ps;
  ps.kind = cfg.phantom == "blobs" ? PhantomKind::blobs : PhantomKind::shepp_logan;
  ps.rows = m;
  ps.cols = n;
  ps.seed = cfg.seed;
  ComplexImage phantom = make_phantom(ps);

  CoilSimSpec cs;
  cs.ncoils = cfg.coils;
  cs.layout = cfg.layout == "ring" ? CoilLayout::ring : CoilLayout::linear_posterior;
  cs.gaussian_width = cfg.coil_width;
  cs.phase_gradient = cfg.phase_gradient;
  cs.support_threshold = cfg.support_threshold;
  cs.seed = cfg.seed + 1;
  const CoilSet raw = simulate_coils(cs, m, n);
  Support support = support_from_image(phantom, cfg.support_threshold);
  CoilSet sens = normalize_sensitivities(raw, support);

  phantom *= cfg.signal_scale;
  CoilSet images = normalize_coil_images(coil_images(phantom, sens), sens);
  if (cfg.keep_coils != 0) {
    CompressedCoils cc = coil_compress(images, sens, cfg.keep_coils);
    images = std::move(cc.images);
    sens = std::move(cc.sens);
  }

  MaskOptions mo;
  mo.accel = cfg.accel;
  mo.center_fraction = cfg.center_fraction;
  mo.density_power = cfg.density_power;
  mo.seed = cfg.seed + 2;
  SamplingMask mask = make_mask(cfg.mask_kind(), m, n, mo);
  CoilSet kspace = simulate_kspace(images, mask, cfg.noise * cfg.signal_scale, cfg.seed + 3);
  return {std::move(phantom), std::move(sens), std::move(kspace), std::move(mask), std::move(support)};
}

inline ReconResult reconstruct(const SimulatedData &data, const ReconParams &params, PrecondKind kind) {
  EncodingContext ctx(data.sens, data.mask, params);
  return run(data.kspace, ctx, kind);
}

inline std::filesystem::path ensure_dir(const std::string &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + dir + ": " + ec.message());
  return dir;
}

/// Writes phantom.cimg, sens.cimg, kspace.cimg, mask.cimg and mask.pgm.
inline SimulatedData cmd_simulate(const Config &cfg) {
  SimulatedData data = simulate(cfg);
  const auto dir = ensure_dir(cfg.out);
  write_cimg(data.phantom, dir / "phantom.cimg");
  write_cimg(data.sens, dir / "sens.cimg");
  write_cimg(data.kspace, dir / "kspace.cimg");
  write_cimg(data.mask.as_image(), dir / "mask.cimg");
  write_bytes(dir / "mask.pgm", encode_mask_pgm(data.mask));
  return data;
}

inline SimulatedData load_simulated(const std::filesystem::path &dir, double accel, MaskKind kind) {
  SimulatedData data{ComplexImage(1, 1), read_cimg(dir / "sens.cimg"), read_cimg(dir / "kspace.cimg"),
                     SamplingMask::from_image(read_cimg_image(dir / "mask.cimg"), accel, kind), Support{}};
  if (std::filesystem::exists(dir / "phantom.cimg")) data.phantom = read_cimg_image(dir / "phantom.cimg");
  return data;
}

/// Writes recon.cimg, recon.pgm, convergence.csv and, when a reference
/// phantom is present, diff.cimg / diff.pgm (|recon| - |reference|, absolute).
inline ReconResult cmd_recon(const Config &cfg) {
  cfg.check();
  const std::filesystem::path in = cfg.in.empty() ? cfg.out : cfg.in;
  const SimulatedData data = load_simulated(in, cfg.accel, cfg.mask_kind());
  ReconResult res = reconstruct(data, cfg.params(), parse_precond(cfg.precond));
  const auto dir = ensure_dir(cfg.out);
  write_cimg(res.image, dir / "recon.cimg");
  write_pgm(res.image, dir / "recon.pgm");
  write_text(dir / "convergence.csv", convergence_csv(res.log));
  if (data.phantom.same_shape(res.image)) {
    ComplexImage diff(res.image.rows(), res.image.cols());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = std::abs(std::abs(res.image[k]) - std::abs(data.phantom[k]));
    write_cimg(diff, dir / "diff.cimg");
    write_pgm(diff, dir / "diff.pgm");
  }
  return res;
}

struct BenchRun {
  std::size_t size;
  PrecondKind kind;
  ReconResult result;
  double relative_error; // vs. ground truth, on the subject support
};

struct BenchReport {
  std::vector<BenchRun> runs;

  const BenchRun &find(std::size_t size, PrecondKind kind) const {
    for (const auto &r : runs) {
      if (r.size == size && r.kind == kind) return r;
    }
    throw Error(Errc::invalid_argument, "no bench run for size " + std::to_string(size));
  }

  /// Circulant build time as a share of that run's total time.
  double build_share(std::size_t size) const {
    const auto &c = find(size, PrecondKind::circulant).result.log;
    return c.preconditioner_build_seconds / c.total_seconds();
  }
  /// Build time relative to the unpreconditioned reconstruction's total time.
  double build_share_vs_none(std::size_t size) const {
    return find(size, PrecondKind::circulant).result.log.preconditioner_build_seconds /
           find(size, PrecondKind::none).result.log.total_seconds();
  }
  double pcg_time_speedup(std::size_t size) const {
    return find(size, PrecondKind::none).result.log.total_pcg_seconds() /
           find(size, PrecondKind::circulant).result.log.total_pcg_seconds();
  }
  double total_time_speedup(std::size_t size) const {
    return find(size, PrecondKind::none).result.log.total_seconds() /
           find(size, PrecondKind::circulant).result.log.total_seconds();
  }
  double iteration_ratio(std::size_t size, PrecondKind kind = PrecondKind::circulant) const {
    return static_cast<double>(find(size, PrecondKind::none).result.log.total_pcg_iterations()) /
           static_cast<double>(find(size, kind).result.log.total_pcg_iterations());
  }

  std::string iterations_csv() const {
    std::ostringstream os;
    os << "size,precond,outer,pcg_iters,final_relres\n" << std::setprecision(9);
    for (const auto &r : runs) {
      for (const auto &o : r.result.log.outer) {
        os << r.size << ',' << to_string(r.kind) << ',' << o.outer << ',' << o.pcg_iterations << ','
           << o.final_relres << '\n';
      }
    }
    return os.str();
  }

  std::string timing_csv() const {
    std::ostringstream os;
    os << "size,precond,total_pcg_iters,build_s,rhs_s,pcg_s,shrink_s,feedback_s,total_s,rel_error\n"
       << std::setprecision(9);
    for (const auto &r : runs) {
      double rhs = 0, pcg = 0, shr = 0, fb = 0;
      for (const auto &o : r.result.log.outer) {
        rhs += o.rhs_seconds;
        pcg += o.pcg_seconds;
        shr += o.shrink_seconds;
        fb += o.feedback_seconds;
      }
      os << r.size << ',' << to_string(r.kind) << ',' << r.result.log.total_pcg_iterations() << ','
         << r.result.log.preconditioner_build_seconds << ',' << rhs << ',' << pcg << ',' << shr << ',' << fb
         << ',' << r.result.log.total_seconds() << ',' << r.relative_error << '\n';
    }
    return os.str();
  }

  std::string build_table_csv() const {
    std::ostringstream os;
    os << "size,build_s,total_circulant_s,total_none_s,share_pct,share_vs_none_pct,pcg_speedup,total_speedup\n"
       << std::setprecision(6);
    std::vector<std::size_t> sizes;
    for (const auto &r : runs) {
      if (r.kind == PrecondKind::circulant) sizes.push_back(r.size);
    }
    for (std::size_t s : sizes) {
      os << s << ',' << find(s, PrecondKind::circulant).result.log.preconditioner_build_seconds << ','
         << find(s, PrecondKind::circulant).result.log.total_seconds() << ','
         << find(s, PrecondKind::none).result.log.total_seconds() << ',' << 100.0 * build_share(s) << ','
         << 100.0 * build_share_vs_none(s) << ',' << pcg_time_speedup(s) << ',' << total_time_speedup(s) << '\n';
    }
    return os.str();
  }
};

/// none / jacobi / circulant over cfg.bench_sizes. Writes iterations.csv,
/// timing.csv and build_table.csv when write_files is set.
inline BenchReport cmd_bench(const Config &cfg, bool write_files = true) {
  cfg.check();
  BenchReport report;
  for (std::size_t size : cfg.bench_sizes) {
    Config c = cfg;
    c.size = size;
    const SimulatedData data = simulate(c);
    for (PrecondKind kind : {PrecondKind::none, PrecondKind::jacobi, PrecondKind::circulant}) {
      ReconResult res = reconstruct(data, c.params(), kind);
      const double err = relative_error_on_support(res.image, data.phantom, data.support);
      report.runs.push_back({size, kind, std::move(res), err});
    }
  }
  if (write_files) {
    const auto dir = ensure_dir(cfg.out);
    write_text(dir / "iterations.csv", report.iterations_csv());
    write_text(dir / "timing.csv", report.timing_csv());
    write_text(dir / "build_table.csv", report.build_table_csv());
  }
  return report;
}

/// Writes complexity.csv (N, flops_M, flops_A, flops_combined).
inline std::vector<complexity::CostPoint> cmd_flops(const Config &cfg, bool write_files = true) {
  if (cfg.flops_min_log2 < 1 || cfg.flops_max_log2 < cfg.flops_min_log2 || cfg.flops_max_log2 > 40) {
    throw Error(Errc::config_invalid, "bad flops size range");
  }
  const auto curve = complexity::cost_ratio_curve(
      cfg.flops_coils, complexity::power_of_two_sizes(cfg.flops_min_log2, cfg.flops_max_log2));
  if (write_files) write_text(ensure_dir(cfg.out) / "complexity.csv", complexity::curve_csv(curve));
  return curve;
}

} // namespace sbp
