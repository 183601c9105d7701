#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sbp {

enum class Errc {
  dimension_mismatch,
  non_finite_value,
  bad_magic,
  truncated_payload,
  version_unsupported,
  io_error,
  coil_index_out_of_range,
  dimension_not_divisible,
  invalid_argument,
  singular_k,
  singular_diagonal,
  nonfinite_breakdown,
  indefiniteness_detected,
  keep_out_of_range,
  degenerate_support,
  infeasible,
  non_power_of_two,
  size_cap_exceeded,
  not_positive_definite,
  config_invalid,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
  case Errc::dimension_mismatch: return "dimension-mismatch";
  case Errc::non_finite_value: return "non-finite-value";
  case Errc::bad_magic: return "bad-magic";
  case Errc::truncated_payload: return "truncated-payload";
  case Errc::version_unsupported: return "version-unsupported";
  case Errc::io_error: return "io-error";
  case Errc::coil_index_out_of_range: return "coil-index-out-of-range";
  case Errc::dimension_not_divisible: return "dimension-not-divisible";
  case Errc::invalid_argument: return "invalid-argument";
  case Errc::singular_k: return "singular-k";
  case Errc::singular_diagonal: return "singular-diagonal";
  case Errc::nonfinite_breakdown: return "nonfinite-breakdown";
  case Errc::indefiniteness_detected: return "indefiniteness-detected";
  case Errc::keep_out_of_range: return "keep-out-of-range";
  case Errc::degenerate_support: return "degenerate-support";
  case Errc::infeasible: return "infeasible";
  case Errc::non_power_of_two: return "non-power-of-two-N";
  case Errc::size_cap_exceeded: return "size-cap-exceeded";
  case Errc::not_positive_definite: return "not-positive-definite";
  case Errc::config_invalid: return "config-invalid";
  }
  return "unknown";
}

/// Every failure in the library is reported as an Error carrying a
/// machine-readable code plus a human-readable message.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string &what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

  /// Numerical failures map to exit code 3, IO to 4, everything else
  /// (bad input, bad configuration) to 2.
  bool is_numerical() const noexcept {
    switch (code_) {
    case Errc::singular_k:
    case Errc::singular_diagonal:
    case Errc::nonfinite_breakdown:
    case Errc::indefiniteness_detected:
    case Errc::not_positive_definite:
    case Errc::non_finite_value:
      return true;
    default:
      return false;
    }
  }
  bool is_io() const noexcept {
    switch (code_) {
    case Errc::io_error:
    case Errc::bad_magic:
    case Errc::truncated_payload:
    case Errc::version_unsupported:
      return true;
    default:
      return false;
    }
  }

private:
  Errc code_;
};

} // namespace sbp
