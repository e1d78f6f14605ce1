#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "error.hpp"
#include "signal_model.hpp"

namespace onebit {

namespace detail {

inline void check_unit_interval(double x, const char* what) {
  if (!(x >= -1.0 && x <= 1.0)) throw error(errc::out_of_range, what);
}

inline void check_rho(double rho) {
  if (!(rho >= 0.0 && rho < 0.5)) throw error(errc::invalid_rho, "flip ratio must lie in [0, 0.5)");
}

}  // namespace detail

/// Per-column mismatch probabilities, estimated or exact.
struct FlipProbabilityVector {
  std::vector<double> p;
  std::size_t m = 0;
};

/// h_j = cos(pi * P_j).
struct ProxyVector {
  std::vector<double> h;
};

struct CandidateSupport {
  std::vector<std::size_t> indices;  // ascending
  std::vector<std::size_t> ranked;   // same set, by decreasing magnitude
  double alpha_used = 1.0;
  std::size_t target_size = 0;
};

struct Lemma2Constants {
  double c1;
  double c2;

  static Lemma2Constants make(std::size_t m, double rho) {
    if (m == 0) throw error(errc::invalid_parameter, "m must be positive");
    detail::check_rho(rho);
    const double md = static_cast<double>(m);
    const double q = 1.0 - 2.0 * rho;
    return {1.0 / (4.0 * md), std::numbers::pi * std::numbers::pi / (4.0 * md * q * q)};
  }
};

/// P(sign(x^T phi) != sign(phi_j)) for Gaussian phi and unit-norm x.
inline double app_probability(double x_j) {
  detail::check_unit_interval(x_j, "app_probability: |x_j| must be <= 1");
  return std::acos(x_j) / std::numbers::pi;
}

/// Mismatch probability between a noisy bit and the sign of column entry j.
inline double flip_probability(double x_j, double rho) {
  detail::check_unit_interval(x_j, "flip_probability: |x_j| must be <= 1");
  detail::check_rho(rho);
  return (1.0 - 2.0 * rho) / std::numbers::pi * std::acos(x_j) + rho;
}

/// Mean of the Binomial(m, P_j) Hamming distance.
inline double expected_hamming(double x_j, double rho, std::size_t m) {
  return static_cast<double>(m) * flip_probability(x_j, rho);
}

/// 1 + C1 - C2 / eps^2. Not clamped: values <= 0 mean the bound is vacuous.
inline double lemma2_lower_bound(std::size_t m, double rho, double eps) {
  if (!(eps > 0.0)) throw error(errc::invalid_parameter, "eps must be positive");
  const auto c = Lemma2Constants::make(m, rho);
  return 1.0 + c.c1 - c.c2 / (eps * eps);
}

/// Number of i with y_i != sign(column_i).
inline std::size_t hamming_distance(const BitMeasurements& y, std::span<const double> column) {
  if (y.size() != column.size()) throw error(errc::dimension_mismatch, "hamming_distance: length mismatch");
  std::size_t count = 0;
  for (std::size_t i = 0; i < column.size(); ++i)
    count += static_cast<std::size_t>(sign_positive(column[i]) != (y[i] > 0));
  return count;
}

/// H{y, A_j} for every column, one row-major pass. Counts are integers, so
/// the result does not depend on traversal order. Reads the IEEE sign bit;
/// MeasurementEnsemble stores no negative zeros, so this agrees with
/// sign_positive().
inline std::vector<std::uint64_t> hamming_counts(const BitMeasurements& y, const MeasurementEnsemble& a) {
  if (a.m() != y.size()) throw error(errc::dimension_mismatch, "hamming_counts: rows != bits");
  const std::size_t n = a.n();
  std::vector<std::uint64_t> counts(n, 0);
  std::uint64_t* c = counts.data();
  for (std::size_t i = 0; i < a.m(); ++i) {
    const double* row = a.row(i).data();
    const std::uint64_t negative_bit = y[i] > 0 ? 0u : 1u;
    for (std::size_t j = 0; j < n; ++j) c[j] += (std::bit_cast<std::uint64_t>(row[j]) >> 63) ^ negative_bit;
  }
  return counts;
}

inline FlipProbabilityVector estimate_flip_probabilities(const BitMeasurements& y, const MeasurementEnsemble& a) {
  const auto counts = hamming_counts(y, a);
  FlipProbabilityVector out;
  out.m = a.m();
  out.p.resize(counts.size());
  const double md = static_cast<double>(a.m());
  for (std::size_t j = 0; j < counts.size(); ++j) out.p[j] = static_cast<double>(counts[j]) / md;
  return out;
}

/// Proxy amplitudes with the noise level taken as zero; the ordering of
/// |h| is the same for every flip ratio below one half.
inline ProxyVector estimate_proxy(const BitMeasurements& y, const MeasurementEnsemble& a) {
  const auto probs = estimate_flip_probabilities(y, a);
  ProxyVector out;
  out.h.resize(probs.p.size());
  for (std::size_t j = 0; j < probs.p.size(); ++j) out.h[j] = std::cos(std::numbers::pi * probs.p[j]);
  return out;
}

/// alpha = 1 + alpha0 * exp(-tau * m / n).
inline double adaptive_alpha(std::size_t m, std::size_t n, double alpha0, double tau) {
  if (m == 0 || n == 0) throw error(errc::invalid_parameter, "adaptive_alpha: m, n must be positive");
  if (!(alpha0 >= 0.0) || !(tau > 0.0))
    throw error(errc::invalid_parameter, "adaptive_alpha: need alpha0 >= 0 and tau > 0");
  return 1.0 + alpha0 * std::exp(-tau * static_cast<double>(m) / static_cast<double>(n));
}

/// round(alpha * k) clamped to [k, min(n, m - 1)].
inline std::size_t candidate_size(double alpha, std::size_t k, std::size_t n, std::size_t m) {
  if (!(alpha >= 1.0)) throw error(errc::invalid_parameter, "alpha must be >= 1");
  if (k == 0) throw error(errc::invalid_parameter, "k must be positive");
  if (m < 2) throw error(errc::precondition, "need at least two measurements");
  const std::size_t upper = std::min(n, m - 1);
  if (k > upper) throw error(errc::precondition, "k must not exceed min(n, m - 1)");
  const double raw = std::round(alpha * static_cast<double>(k));
  if (raw >= static_cast<double>(upper)) return upper;
  return std::max(k, static_cast<std::size_t>(raw));
}

/// Indices of the l largest magnitudes. Ties go to the smaller index.
inline CandidateSupport find_supp(std::span<const double> magnitudes, std::size_t l, double alpha_used = 1.0) {
  if (l < 1 || l > magnitudes.size()) throw error(errc::invalid_parameter, "find_supp: need 1 <= l <= n");
  std::vector<std::size_t> order(magnitudes.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(l), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (magnitudes[a] != magnitudes[b]) return magnitudes[a] > magnitudes[b];
                      return a < b;
                    });
  CandidateSupport out;
  out.ranked.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(l));
  out.indices = out.ranked;
  std::sort(out.indices.begin(), out.indices.end());
  out.alpha_used = alpha_used;
  out.target_size = l;
  return out;
}

}  // namespace onebit
