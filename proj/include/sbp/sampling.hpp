#pragma once

// Variable-density k-space masks. Patterns are laid out in centred
// coordinates and rolled so DC lands on index 0.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sbp/image.hpp"
#include "sbp/random.hpp"

namespace sbp {

struct MaskOptions {
  double accel = 4.0;
  double center_fraction = 0.08;
  double density_power = 3.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline void check_mask_options(const MaskOptions &o) {
  if (!(o.accel >= 1.0)) throw Error(Errc::invalid_argument, "R must be >= 1");
  if (!(o.center_fraction >= 0.0 && o.center_fraction < 1.0)) {
    throw Error(Errc::invalid_argument, "center fraction must lie in [0, 1)");
  }
}

// Centred coordinate u (DC at floor(len/2)) to unshifted index.
inline std::size_t unshift(std::size_t u, std::size_t len) { return (u + len - len / 2) % len; }

// Weighted sampling of `count` items without replacement (exponential keys:
// the largest u^(1/w) win). Returns chosen item indices.
inline std::vector<std::size_t> weighted_pick(const std::vector<double> &weights, std::size_t count,
                                              Rng &rng) {
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    keys.emplace_back(std::log(rng.uniform_open()) / weights[k], k);
  }
  count = std::min(count, keys.size());
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(count), keys.end(),
                    [](const auto &a, const auto &b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(keys[k].second);
  return out;
}

} // namespace detail

/// Random full lines along the foot-head (row) direction: floor(m / R) rows,
/// including a fully sampled block of ceil(centerFraction m) rows around DC;
/// the rest drawn with probability ~ (1 + |u - m/2| / m)^-p.
inline SamplingMask cartesian_vd_mask(std::size_t m, std::size_t n, const MaskOptions &o) {
  detail::check_mask_options(o);
  const std::size_t rows_total = static_cast<std::size_t>(std::floor(static_cast<double>(m) / o.accel));
  const std::size_t block = static_cast<std::size_t>(std::ceil(o.center_fraction * static_cast<double>(m)));
  if (block > rows_total || rows_total == 0) {
    throw Error(Errc::infeasible, "center block of " + std::to_string(block) + " rows exceeds budget of " +
                                      std::to_string(rows_total));
  }
  const std::size_t c = m / 2;
  const std::size_t start = c - std::min(c, block / 2);
  std::vector<std::uint8_t> chosen(m, 0);
  for (std::size_t u = start; u < start + block && u < m; ++u) chosen[u] = 1;

  std::vector<std::size_t> candidates;
  std::vector<double> weights;
  for (std::size_t u = 0; u < m; ++u) {
    if (chosen[u]) continue;
    const double dist = std::abs(static_cast<double>(u) - static_cast<double>(c));
    candidates.push_back(u);
    weights.push_back(std::pow(1.0 + dist / static_cast<double>(m), -o.density_power));
  }
  Rng rng(o.seed);
  for (std::size_t k : detail::weighted_pick(weights, rows_total - block, rng)) chosen[candidates[k]] = 1;

  std::vector<std::uint8_t> cells(m * n, 0);
  for (std::size_t u = 0; u < m; ++u) {
    if (!chosen[u]) continue;
    const std::size_t i = detail::unshift(u, m);
    std::fill_n(cells.begin() + static_cast<std::ptrdiff_t>(i * n), n, std::uint8_t{1});
  }
  return {m, n, std::move(cells), o.accel, MaskKind::cartesian_lines, o.seed};
}

/// floor(N / R) individual cells: a fully sampled disc of radius
/// ceil(centerFraction min(m, n) / 2) around DC, the rest drawn with density
/// (1 + r / r_max)^-p where r_max = min(m, n) / 2.
inline SamplingMask random_vd_mask(std::size_t m, std::size_t n, const MaskOptions &o) {
  detail::check_mask_options(o);
  const std::size_t total = static_cast<std::size_t>(std::floor(static_cast<double>(m * n) / o.accel));
  const double radius = std::ceil(o.center_fraction * static_cast<double>(std::min(m, n)) / 2.0);
  const double r_max = static_cast<double>(std::min(m, n)) / 2.0;
  const double cu = static_cast<double>(m / 2), cv = static_cast<double>(n / 2);

  std::vector<std::uint8_t> chosen(m * n, 0);
  std::size_t disc = 0;
  std::vector<std::size_t> candidates;
  std::vector<double> weights;
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      const double r = std::hypot(static_cast<double>(u) - cu, static_cast<double>(v) - cv);
      if (r <= radius) {
        chosen[u * n + v] = 1;
        ++disc;
      } else {
        candidates.push_back(u * n + v);
        weights.push_back(std::pow(1.0 + r / r_max, -o.density_power));
      }
    }
  }
  if (disc > total || total == 0) {
    throw Error(Errc::infeasible, "center disc of " + std::to_string(disc) + " cells exceeds budget of " +
                                      std::to_string(total));
  }
  Rng rng(o.seed);
  for (std::size_t k : detail::weighted_pick(weights, total - disc, rng)) chosen[candidates[k]] = 1;

  std::vector<std::uint8_t> cells(m * n, 0);
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (chosen[u * n + v]) cells[detail::unshift(u, m) * n + detail::unshift(v, n)] = 1;
    }
  }
  return {m, n, std::move(cells), o.accel, MaskKind::random, o.seed};
}

inline SamplingMask make_mask(MaskKind kind, std::size_t m, std::size_t n, const MaskOptions &o) {
  return kind == MaskKind::cartesian_lines ? cartesian_vd_mask(m, n, o) : random_vd_mask(m, n, o);
}

/// P5 graymap with sampled cells at 255, DC at the centre for viewing.
inline std::vector<unsigned char> encode_mask_pgm(const SamplingMask &mask) {
  const std::string header =
      "P5\n" + std::to_string(mask.cols()) + " " + std::to_string(mask.rows()) + "\n255\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  for (std::size_t u = 0; u < mask.rows(); ++u) {
    for (std::size_t v = 0; v < mask.cols(); ++v) {
      const auto cell = mask(detail::unshift(u, mask.rows()), detail::unshift(v, mask.cols()));
      out.push_back(cell ? 255 : 0);
    }
  }
  return out;
}

} // namespace sbp
