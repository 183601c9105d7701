// sbp: simulate, reconstruct and benchmark preconditioned Split Bregman
// PI-CS reconstructions.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 IO error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "sbp/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::size_t> size, coils, keep_coils;
  std::optional<double> accel, eps;
  std::optional<std::string> mask, precond, out, in;
  std::optional<int> set, outer, inner;
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> bench_sizes;
  std::optional<std::size_t> flops_coils;

  sbp::Config resolve() const {
    sbp::Config c = config.empty() ? sbp::Config{} : sbp::load_config(config);
    if (size) c.size = *size;
    if (coils) c.coils = *coils;
    if (keep_coils) c.keep_coils = *keep_coils;
    if (accel) c.accel = *accel;
    if (eps) c.eps = *eps;
    if (mask) c.mask = *mask;
    if (precond) c.precond = *precond;
    if (out) c.out = *out;
    if (in) c.in = *in;
    if (set) c.set = *set;
    if (outer) c.outer = *outer;
    if (inner) c.inner = *inner;
    if (seed) c.seed = *seed;
    if (!bench_sizes.empty()) c.bench_sizes = bench_sizes;
    if (flops_coils) c.flops_coils = *flops_coils;
    return c;
  }
};

void add_common(CLI::App *cmd, Overrides &o) {
  cmd->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--size", o.size, "image size (square)");
  cmd->add_option("--coils", o.coils, "number of simulated coils");
  cmd->add_option("--accel", o.accel, "undersampling factor R");
  cmd->add_option("--mask", o.mask, "cartesian | random");
  cmd->add_option("--precond", o.precond, "none | jacobi | circulant");
  cmd->add_option("--set", o.set, "regularization set 1 | 2 | 3");
  cmd->add_option("--outer", o.outer, "outer Bregman iterations");
  cmd->add_option("--inner", o.inner, "inner Bregman iterations");
  cmd->add_option("--eps", o.eps, "PCG relative residual tolerance");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--keep-coils", o.keep_coils, "virtual coils kept after SVD compression (0 = all)");
  cmd->add_option("--out", o.out, "output directory");
}

void print_log(const sbp::ConvergenceLog &log) {
  std::cout << sbp::convergence_csv(log);
  std::cout << "# preconditioner build " << log.preconditioner_build_seconds << " s, total PCG iterations "
            << log.total_pcg_iterations() << ", total " << log.total_seconds() << " s\n";
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Preconditioned Split Bregman reconstruction toolkit"};
  app.require_subcommand(1);
  Overrides o;

  auto *sim = app.add_subcommand("simulate", "simulate phantom, sensitivities and undersampled k-space");
  add_common(sim, o);
  auto *rec = app.add_subcommand("recon", "reconstruct from simulated files");
  add_common(rec, o);
  rec->add_option("--in", o.in, "input directory (defaults to --out)");
  auto *bench = app.add_subcommand("bench", "none / jacobi / circulant over a size grid");
  add_common(bench, o);
  bench->add_option("--sizes", o.bench_sizes, "image sizes to benchmark");
  auto *flops = app.add_subcommand("flops", "FLOP model curves");
  add_common(flops, o);
  flops->add_option("--flops-coils", o.flops_coils, "coil count for the FLOP curves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const sbp::Config cfg = o.resolve();
    if (sim->parsed()) {
      const auto data = sbp::cmd_simulate(cfg);
      std::cout << "wrote " << cfg.out << ": " << data.kspace.ncoils() << " coils, " << data.mask.sampled()
                << " of " << data.mask.size() << " k-space samples (R=" << data.mask.achieved_r() << ")\n";
    } else if (rec->parsed()) {
      const auto res = sbp::cmd_recon(cfg);
      print_log(res.log);
    } else if (bench->parsed()) {
      const auto report = sbp::cmd_bench(cfg);
      std::cout << report.build_table_csv();
    } else if (flops->parsed()) {
      std::cout << sbp::complexity::curve_csv(sbp::cmd_flops(cfg));
    }
  } catch (const sbp::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.is_io()) return 4;
    if (e.is_numerical()) return 3;
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
