#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hamming.hpp"

namespace onebit {

enum class RecoveryStatus { ok, rank_deficient, zero_vector };

inline const char* to_string(RecoveryStatus s) noexcept {
  switch (s) {
    case RecoveryStatus::ok: return "ok";
    case RecoveryStatus::rank_deficient: return "rank_deficient";
    case RecoveryStatus::zero_vector: return "zero_vector";
  }
  return "unknown";
}

/// Output of any recovery routine. On failure x_star is the zero vector and
/// message carries the diagnostic.
struct RecoveryResult {
  RecoveryStatus status = RecoveryStatus::ok;
  std::vector<double> x_star;
  std::vector<std::size_t> support;
  CandidateSupport candidate_support;
  std::vector<double> coefficients;
  double alpha_used = 1.0;
  double wall_time = 0.0;
  std::size_t iterations = 0;
  /// BIHT only: objective of each accepted iterate.
  std::vector<double> objective_trace;
  std::string message;

  bool ok() const noexcept { return status == RecoveryStatus::ok; }
};

}  // namespace onebit
