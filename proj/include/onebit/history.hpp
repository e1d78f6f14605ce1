#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "format.hpp"
#include "hamming.hpp"
#include "lstsq.hpp"
#include "recovery.hpp"
#include "signal_model.hpp"

namespace onebit {

struct FixedAlpha {
  double alpha = 1.0;
};

struct AdaptiveAlpha {
  double alpha0 = 4.0;
  double tau = 1.0;
};

using AlphaMode = std::variant<FixedAlpha, AdaptiveAlpha>;

/// "fixed:<a>" or "adaptive:<alpha0>:<tau>", numbers in shortest round-trip form.
inline std::string describe(const AlphaMode& mode) {
  if (const auto* f = std::get_if<FixedAlpha>(&mode)) return "fixed:" + format_double(f->alpha);
  const auto& a = std::get<AdaptiveAlpha>(mode);
  return "adaptive:" + format_double(a.alpha0) + ":" + format_double(a.tau);
}

inline void validate(const AlphaMode& mode) {
  if (const auto* f = std::get_if<FixedAlpha>(&mode)) {
    if (!(f->alpha >= 1.0)) throw error(errc::invalid_parameter, "fixed alpha must be >= 1");
  } else {
    const auto& a = std::get<AdaptiveAlpha>(mode);
    if (!(a.alpha0 >= 0.0) || !(a.tau > 0.0))
      throw error(errc::invalid_parameter, "adaptive alpha needs alpha0 >= 0 and tau > 0");
  }
}

inline double resolve_alpha(const AlphaMode& mode, std::size_t m, std::size_t n) {
  if (const auto* f = std::get_if<FixedAlpha>(&mode)) return f->alpha;
  const auto& a = std::get<AdaptiveAlpha>(mode);
  return adaptive_alpha(m, n, a.alpha0, a.tau);
}

struct HistoryParams {
  std::size_t k = 1;
  AlphaMode alpha_mode = AdaptiveAlpha{};

  void validate() const {
    if (k == 0) throw error(errc::invalid_parameter, "k must be positive");
    onebit::validate(alpha_mode);
  }
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Least squares on the given columns (in the given order), optional hard
/// threshold to k, normalization. Fills the coefficient and output fields.
inline void recover_on_columns(const BitMeasurements& y, const MeasurementEnsemble& a,
                               const std::vector<std::size_t>& columns, std::size_t k,
                               RecoveryResult& out) {
  const std::size_t n = a.n();
  out.x_star.assign(n, 0.0);
  try {
    SubmatrixView view(a, columns);
    out.coefficients = left_divide(view, y);
  } catch (const error& e) {
    if (e.code() != errc::rank_deficient) throw;
    out.status = RecoveryStatus::rank_deficient;
    out.message = e.what();
    return;
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t c = 0; c < columns.size(); ++c) x[columns[c]] = out.coefficients[c];
  if (columns.size() > k) x = hard_threshold(x, k);

  // Norm accumulated in column order so the arithmetic does not depend on
  // how the coordinates are labelled.
  double sq = 0.0;
  for (std::size_t col : columns) sq += x[col] * x[col];
  if (!(sq > 0.0)) {
    out.status = RecoveryStatus::zero_vector;
    out.message = "all retained coefficients are zero";
    return;
  }
  const double norm = std::sqrt(sq);
  for (std::size_t col : columns) {
    out.x_star[col] = x[col] / norm;
    if (out.x_star[col] != 0.0) out.support.push_back(col);
  }
  std::sort(out.support.begin(), out.support.end());
}

}  // namespace detail

/// Hamming support detection followed by least squares on the candidate
/// support. The candidate columns enter the solve in decreasing |h_j| order.
///
/// Preconditions violations (bad dimensions, k > min(n, m - 1), invalid
/// alpha) throw. Numerical failures are reported through the status.
inline RecoveryResult history_recover(const BitMeasurements& y, const MeasurementEnsemble& a,
                                      const HistoryParams& params) {
  params.validate();
  if (a.m() != y.size()) throw error(errc::dimension_mismatch, "history_recover: rows != bits");
  const auto start = detail::Clock::now();

  const double alpha = resolve_alpha(params.alpha_mode, a.m(), a.n());
  const std::size_t target = candidate_size(alpha, params.k, a.n(), a.m());

  const ProxyVector proxy = estimate_proxy(y, a);
  std::vector<double> magnitude(proxy.h.size());
  std::transform(proxy.h.begin(), proxy.h.end(), magnitude.begin(), [](double v) { return std::abs(v); });

  RecoveryResult out;
  out.alpha_used = alpha;
  out.candidate_support = find_supp(magnitude, target, alpha);
  detail::recover_on_columns(y, a, out.candidate_support.ranked, params.k, out);
  out.wall_time = detail::seconds_since(start);
  return out;
}

/// Skips detection and solves on forced_support (sorted ascending first).
inline RecoveryResult history_recover_with_support(const BitMeasurements& y, const MeasurementEnsemble& a,
                                                   std::span<const std::size_t> forced_support, std::size_t k) {
  if (k == 0) throw error(errc::invalid_parameter, "k must be positive");
  if (a.m() != y.size()) throw error(errc::dimension_mismatch, "history_recover_with_support: rows != bits");
  if (forced_support.empty()) throw error(errc::invalid_dimension, "forced support is empty");
  if (forced_support.size() >= a.m())
    throw error(errc::precondition, "forced support must be smaller than the number of measurements");
  const auto start = detail::Clock::now();

  std::vector<std::size_t> columns(forced_support.begin(), forced_support.end());
  std::sort(columns.begin(), columns.end());
  if (std::adjacent_find(columns.begin(), columns.end()) != columns.end())
    throw error(errc::invalid_parameter, "forced support has duplicate indices");

  RecoveryResult out;
  out.candidate_support.indices = columns;
  out.candidate_support.ranked = columns;
  out.candidate_support.target_size = columns.size();
  out.candidate_support.alpha_used = static_cast<double>(columns.size()) / static_cast<double>(k);
  out.alpha_used = out.candidate_support.alpha_used;
  detail::recover_on_columns(y, a, columns, k, out);
  out.wall_time = detail::seconds_since(start);
  return out;
}

}  // namespace onebit
