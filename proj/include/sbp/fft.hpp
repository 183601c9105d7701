#pragma once

// Unitary 2D DFT on top of FFTW. DC sits at index (0, 0); no shifts.

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "sbp/image.hpp"

namespace sbp {

namespace detail {

// FFTW's planner is not thread-safe but executing an existing plan on new
// arrays is, so plans are created under a lock and shared afterwards.
class FftPlanCache {
public:
  static FftPlanCache &instance() {
    static FftPlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t rows, std::size_t cols, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(rows, cols, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<cplx> scratch(rows * cols);
    auto *buf = reinterpret_cast<fftw_complex *>(scratch.data());
    // ESTIMATE keeps plans (and so every result) reproducible run to run.
    fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), buf, buf,
                                      sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  FftPlanCache(const FftPlanCache &) = delete;
  FftPlanCache &operator=(const FftPlanCache &) = delete;

private:
  FftPlanCache() = default;
  ~FftPlanCache() {
    for (auto &[key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

inline void fft_inplace(ComplexImage &img, int sign) {
  fftw_plan plan = FftPlanCache::instance().get(img.rows(), img.cols(), sign);
  auto *buf = reinterpret_cast<fftw_complex *>(img.data().data());
  fftw_execute_dft(plan, buf, buf);
  const double scale = 1.0 / std::sqrt(static_cast<double>(img.size()));
  for (auto &v : img) v *= scale;
}

} // namespace detail

inline void fft2_inplace(ComplexImage &img) { detail::fft_inplace(img, FFTW_FORWARD); }
inline void ifft2_inplace(ComplexImage &img) { detail::fft_inplace(img, FFTW_BACKWARD); }

inline ComplexImage fft2(ComplexImage img) {
  fft2_inplace(img);
  return img;
}

inline ComplexImage ifft2(ComplexImage img) {
  ifft2_inplace(img);
  return img;
}

} // namespace sbp
