#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "error.hpp"
#include "history.hpp"
#include "lstsq.hpp"
#include "recovery.hpp"
#include "signal_model.hpp"

namespace onebit {

/// Binary iterative hard thresholding with the one-sided l2 objective
///   J(x) = (1/2M) || min(y o Ax, 0) ||^2
/// and update x <- H_K(x - step * grad J(x)), grad J(x) = (1/M) A^T (y o min(y o Ax, 0)).
struct BihtParams {
  std::size_t k = 1;
  std::size_t max_iters = 200;
  double step_size = 1.0;
  /// Stop at the first iterate whose objective does not decrease. Disable to
  /// run exactly max_iters iterations (fixed-budget timing).
  bool stop_on_stall = true;

  void validate() const {
    if (k == 0) throw error(errc::invalid_parameter, "k must be positive");
    if (max_iters < 1) throw error(errc::invalid_parameter, "max_iters must be >= 1");
    if (!(step_size > 0.0)) throw error(errc::invalid_parameter, "step_size must be positive");
  }
};

struct PassiveParams {
  std::size_t k = 1;
  double gamma = 0.0;

  /// gamma = sqrt(log N / M).
  static PassiveParams for_dimensions(std::size_t k, std::size_t n, std::size_t m) {
    if (n == 0 || m == 0) throw error(errc::invalid_dimension, "n and m must be positive");
    return {k, std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(m))};
  }

  void validate() const {
    if (k == 0) throw error(errc::invalid_parameter, "k must be positive");
    if (!(gamma > 0.0)) throw error(errc::invalid_parameter, "gamma must be positive");
  }
};

namespace detail {

/// Objective of x / ||x|| given ax = A x.
inline double biht_objective(const BitMeasurements& y, std::span<const double> ax, double norm_sq) {
  double acc = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double margin = y[i] * ax[i];
    if (margin < 0.0) acc += margin * margin;
  }
  return acc / (2.0 * static_cast<double>(ax.size()) * norm_sq);
}

}  // namespace detail

/// BIHT-l2 from x0 = 0. The l2 gradient vanishes at zero, so the first step
/// is the back-projection A^T y / M. Returns the best (normalized) iterate.
inline RecoveryResult biht_l2_recover(const BitMeasurements& y, const MeasurementEnsemble& a,
                                      const BihtParams& params) {
  params.validate();
  if (a.m() != y.size()) throw error(errc::dimension_mismatch, "biht_l2_recover: rows != bits");
  if (params.k > a.n()) throw error(errc::precondition, "k must not exceed n");
  const auto start = detail::Clock::now();
  const std::size_t m = a.m(), n = a.n();
  const double inv_m = 1.0 / static_cast<double>(m);

  std::vector<double> x(n, 0.0);
  std::vector<double> ax(m, 0.0);
  std::vector<double> best;
  double best_obj = std::numeric_limits<double>::infinity();
  double prev_obj = std::numeric_limits<double>::infinity();
  std::vector<double> residual(m);

  RecoveryResult out;
  for (std::size_t it = 0; it < params.max_iters; ++it) {
    if (it == 0) {
      residual = y.as_real();
      for (double& r : residual) r = -r;
    } else {
      for (std::size_t i = 0; i < m; ++i) {
        const double margin = y[i] * ax[i];
        residual[i] = margin < 0.0 ? ax[i] : 0.0;
      }
    }
    const auto grad = a.multiply_transpose(residual);
    std::vector<double> step(n);
    for (std::size_t j = 0; j < n; ++j) step[j] = x[j] - params.step_size * inv_m * grad[j];
    x = hard_threshold(step, params.k);
    ++out.iterations;

    double norm_sq = 0.0;
    for (double v : x) norm_sq += v * v;
    if (!(norm_sq > 0.0)) break;
    ax = a.multiply(x);
    const double obj = detail::biht_objective(y, ax, norm_sq);
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
      out.objective_trace.push_back(obj);
    }
    if (params.stop_on_stall && !(obj < prev_obj)) break;
    prev_obj = obj;
  }

  if (best.empty()) {
    out.status = RecoveryStatus::zero_vector;
    out.message = "no nonzero iterate";
    out.x_star.assign(n, 0.0);
  } else {
    out.x_star = normalize(best);
    out.support = nonzero_support(out.x_star);
  }
  out.wall_time = detail::seconds_since(start);
  return out;
}

/// Passive closed form: s = A^T y / M, soft threshold at gamma, keep the K
/// largest, normalize.
inline RecoveryResult passive_recover(const BitMeasurements& y, const MeasurementEnsemble& a,
                                      const PassiveParams& params) {
  params.validate();
  if (a.m() != y.size()) throw error(errc::dimension_mismatch, "passive_recover: rows != bits");
  if (params.k > a.n()) throw error(errc::precondition, "k must not exceed n");
  const auto start = detail::Clock::now();

  const auto yr = y.as_real();
  auto s = a.multiply_transpose(yr);
  const double inv_m = 1.0 / static_cast<double>(a.m());
  for (double& v : s) {
    v *= inv_m;
    const double mag = std::abs(v) - params.gamma;
    v = mag > 0.0 ? std::copysign(mag, v) : 0.0;
  }
  s = hard_threshold(s, params.k);

  RecoveryResult out;
  out.iterations = 1;
  out.coefficients = s;
  double sq = 0.0;
  for (double v : s) sq += v * v;
  if (!(sq > 0.0)) {
    out.status = RecoveryStatus::zero_vector;
    out.message = "every score fell below gamma";
    out.x_star.assign(a.n(), 0.0);
  } else {
    out.x_star = normalize(s);
    out.support = nonzero_support(out.x_star);
  }
  out.wall_time = detail::seconds_since(start);
  return out;
}

}  // namespace onebit
