#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hamming.hpp"
#include "signal_model.hpp"

namespace onebit {

/// Monte-Carlo estimate of the per-coordinate mismatch frequency
/// H{y, A_j} / m for m fresh Gaussian rows and flip ratio rho.
struct FlipFrequencyCheck {
  std::vector<double> empirical;
  std::vector<double> predicted;
  std::vector<double> tolerance;  // 4 binomial standard deviations
  double max_deviation = 0.0;
  bool within_tolerance = true;
};

inline FlipFrequencyCheck check_flip_law(const SparseSignal& x, std::size_t m, double rho, Rng& rng) {
  const auto a = gen_measurement_matrix(m, x.n(), rng);
  const auto y = apply_sign_flips(measure(a, x), rho, rng);
  const auto probs = estimate_flip_probabilities(y, a);
  FlipFrequencyCheck out;
  for (std::size_t j = 0; j < x.n(); ++j) {
    const double p = flip_probability(x[j], rho);
    const double dev = std::abs(probs.p[j] - p);
    const double tol = 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(m));
    out.empirical.push_back(probs.p[j]);
    out.predicted.push_back(p);
    out.tolerance.push_back(tol);
    out.max_deviation = std::max(out.max_deviation, dev);
    if (dev > tol) out.within_tolerance = false;
  }
  return out;
}

/// Frequency of H{y, A_u} < H{y, A_v} over fresh draws of A.
struct OrderingCheck {
  double frequency = 0.0;
  double bound = 0.0;
};

inline OrderingCheck check_ordering_bound(const SparseSignal& x, std::size_t u, std::size_t v, std::size_t m,
                                          double rho, std::size_t redraws, Rng& rng) {
  std::size_t wins = 0;
  for (std::size_t r = 0; r < redraws; ++r) {
    const auto a = gen_measurement_matrix(m, x.n(), rng);
    const auto y = apply_sign_flips(measure(a, x), rho, rng);
    const auto counts = hamming_counts(y, a);
    if (counts[u] < counts[v]) ++wins;
  }
  return {static_cast<double>(wins) / static_cast<double>(redraws),
          lemma2_lower_bound(m, rho, x[u] - x[v])};
}

}  // namespace onebit
