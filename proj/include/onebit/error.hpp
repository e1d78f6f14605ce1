#pragma once

#include <stdexcept>
#include <string>

namespace onebit {

enum class errc {
  invalid_dimension,
  dimension_mismatch,
  invalid_rho,
  out_of_range,
  invalid_parameter,
  empty_support,
  rank_deficient,
  zero_vector,
  precondition,
  config,
  io,
};

inline const char* to_string(errc code) noexcept {
  switch (code) {
    case errc::invalid_dimension: return "invalid-dimension";
    case errc::dimension_mismatch: return "dimension-mismatch";
    case errc::invalid_rho: return "invalid-rho";
    case errc::out_of_range: return "out-of-range";
    case errc::invalid_parameter: return "invalid-parameter";
    case errc::empty_support: return "empty-true-support";
    case errc::rank_deficient: return "rank-deficient";
    case errc::zero_vector: return "zero-vector";
    case errc::precondition: return "precondition";
    case errc::config: return "config";
    case errc::io: return "io";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace onebit
