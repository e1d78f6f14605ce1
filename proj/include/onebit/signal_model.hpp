#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace onebit {

/// sign(v) with sign(0) := +1. Every sign comparison in the library goes
/// through this predicate.
constexpr bool sign_positive(double v) noexcept { return v >= 0.0; }

/// A length-N vector with exactly K nonzeros and unit 2-norm.
class SparseSignal {
 public:
  static constexpr double kNormTolerance = 1e-12;

  /// Validates the unit-norm invariant and derives the support.
  explicit SparseSignal(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw error(errc::invalid_dimension, "signal must be nonempty");
    double sq = 0.0;
    for (std::size_t j = 0; j < values_.size(); ++j) {
      if (!std::isfinite(values_[j])) throw error(errc::out_of_range, "signal entries must be finite");
      if (values_[j] != 0.0) support_.push_back(j);
      sq += values_[j] * values_[j];
    }
    if (std::abs(std::sqrt(sq) - 1.0) > kNormTolerance)
      throw error(errc::out_of_range, "signal must have unit 2-norm");
  }

  std::size_t n() const noexcept { return values_.size(); }
  std::size_t k() const noexcept { return support_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<std::size_t>& support() const noexcept { return support_; }
  double operator[](std::size_t j) const { return values_[j]; }

 private:
  std::vector<double> values_;
  std::vector<std::size_t> support_;
};

/// Dense M x N measurement matrix, row-major. Row i is contiguous; column j
/// is read with stride N.
class MeasurementEnsemble {
 public:
  MeasurementEnsemble(std::size_t m, std::size_t n, std::vector<double> entries)
      : m_(m), n_(n), entries_(std::move(entries)) {
    if (m_ == 0 || n_ == 0) throw error(errc::invalid_dimension, "matrix dimensions must be positive");
    if (entries_.size() != m_ * n_)
      throw error(errc::dimension_mismatch, "entry count does not match m*n");
    for (double& v : entries_) {
      if (!std::isfinite(v)) throw error(errc::out_of_range, "matrix entries must be finite");
      if (v == 0.0) v = 0.0;  // drop negative zeros
    }
  }

  std::size_t m() const noexcept { return m_; }
  std::size_t n() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

  std::span<const double> row(std::size_t i) const { return {entries_.data() + i * n_, n_}; }

  std::vector<double> column(std::size_t j) const {
    std::vector<double> out(m_);
    for (std::size_t i = 0; i < m_; ++i) out[i] = entries_[i * n_ + j];
    return out;
  }

  std::span<const double> entries() const noexcept { return entries_; }

  /// A x, accumulated row by row in index order.
  std::vector<double> multiply(std::span<const double> x) const {
    if (x.size() != n_) throw error(errc::dimension_mismatch, "multiply: x has wrong length");
    std::vector<double> out(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const double* r = entries_.data() + i * n_;
      double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
      std::size_t j = 0;
      for (; j + 4 <= n_; j += 4) {
        s0 += r[j] * x[j];
        s1 += r[j + 1] * x[j + 1];
        s2 += r[j + 2] * x[j + 2];
        s3 += r[j + 3] * x[j + 3];
      }
      for (; j < n_; ++j) s0 += r[j] * x[j];
      out[i] = (s0 + s1) + (s2 + s3);
    }
    return out;
  }

  /// A^T v.
  std::vector<double> multiply_transpose(std::span<const double> v) const {
    if (v.size() != m_) throw error(errc::dimension_mismatch, "multiply_transpose: v has wrong length");
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double vi = v[i];
      if (vi == 0.0) continue;
      const double* r = entries_.data() + i * n_;
      for (std::size_t j = 0; j < n_; ++j) out[j] += vi * r[j];
    }
    return out;
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> entries_;
};

/// Vector over {-1, +1}, with the flip ratio used to produce it.
class BitMeasurements {
 public:
  explicit BitMeasurements(std::vector<std::int8_t> bits, double flip_ratio = 0.0)
      : bits_(std::move(bits)), flip_ratio_(flip_ratio) {
    for (auto b : bits_)
      if (b != 1 && b != -1) throw error(errc::out_of_range, "bits must be -1 or +1");
  }

  std::size_t size() const noexcept { return bits_.size(); }
  std::int8_t operator[](std::size_t i) const { return bits_[i]; }
  const std::vector<std::int8_t>& bits() const noexcept { return bits_; }
  double flip_ratio() const noexcept { return flip_ratio_; }

  std::vector<double> as_real() const { return {bits_.begin(), bits_.end()}; }

  friend bool operator==(const BitMeasurements& a, const BitMeasurements& b) {
    return a.bits_ == b.bits_;
  }

 private:
  std::vector<std::int8_t> bits_;
  double flip_ratio_;
};

/// K distinct support indices drawn uniformly (partial Fisher-Yates), values
/// standard normal, then scaled to unit norm.
inline SparseSignal gen_sparse_signal(std::size_t n, std::size_t k, Rng& rng) {
  if (k < 1 || k > n) throw error(errc::invalid_dimension, "gen_sparse_signal requires 1 <= k <= n");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
    std::swap(perm[i], perm[j]);
  }
  std::vector<std::size_t> support(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(support.begin(), support.end());

  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<double> values(n, 0.0);
    double sq = 0.0;
    for (std::size_t idx : support) {
      values[idx] = rng.normal();
      sq += values[idx] * values[idx];
    }
    const double norm = std::sqrt(sq);
    bool ok = norm > 0.0;
    if (ok) {
      for (std::size_t idx : support) {
        values[idx] /= norm;
        if (values[idx] == 0.0) ok = false;
      }
    }
    if (ok) return SparseSignal(std::move(values));
  }
  throw error(errc::zero_vector, "gen_sparse_signal produced a zero on the support twice");
}

/// Entries filled row by row from rng.normal().
inline MeasurementEnsemble gen_measurement_matrix(std::size_t m, std::size_t n, Rng& rng) {
  if (m == 0 || n == 0) throw error(errc::invalid_dimension, "gen_measurement_matrix requires m, n >= 1");
  std::vector<double> entries(m * n);
  for (double& v : entries) v = rng.normal();
  return MeasurementEnsemble(m, n, std::move(entries));
}

/// y = sign(A x), sign(0) = +1.
inline BitMeasurements measure(const MeasurementEnsemble& a, const SparseSignal& x) {
  if (a.n() != x.n()) throw error(errc::dimension_mismatch, "measure: matrix columns != signal length");
  std::vector<std::int8_t> bits(a.m());
  const auto& vals = x.values();
  const auto& supp = x.support();
  for (std::size_t i = 0; i < a.m(); ++i) {
    const auto row = a.row(i);
    double s = 0.0;
    for (std::size_t j : supp) s += row[j] * vals[j];
    bits[i] = sign_positive(s) ? 1 : -1;
  }
  return BitMeasurements(std::move(bits), 0.0);
}

/// Each bit negated independently with probability rho. One uniform draw is
/// consumed per bit, also when rho == 0.
inline BitMeasurements apply_sign_flips(const BitMeasurements& y, double rho, Rng& rng) {
  if (!(rho >= 0.0 && rho < 0.5)) throw error(errc::invalid_rho, "flip ratio must lie in [0, 0.5)");
  std::vector<std::int8_t> bits = y.bits();
  for (auto& b : bits)
    if (rng.uniform() < rho) b = static_cast<std::int8_t>(-b);
  return BitMeasurements(std::move(bits), rho);
}

/// ||x - x*|| / ||x||.
inline double recovery_error(std::span<const double> x, std::span<const double> x_star) {
  if (x.size() != x_star.size()) throw error(errc::dimension_mismatch, "recovery_error: length mismatch");
  double diff = 0.0, ref = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - x_star[j];
    diff += d * d;
    ref += x[j] * x[j];
  }
  if (ref == 0.0) throw error(errc::zero_vector, "recovery_error: reference signal is zero");
  return std::sqrt(diff / ref);
}

inline double recovery_error(const SparseSignal& x, std::span<const double> x_star) {
  return recovery_error(std::span<const double>(x.values()), x_star);
}

/// Percentage of the true support present in the estimate. Both sets are
/// treated as sets; order and duplicates do not matter.
inline double support_detection_accuracy(std::span<const std::size_t> true_supp,
                                          std::span<const std::size_t> est_supp) {
  if (true_supp.empty()) throw error(errc::empty_support, "true support is empty");
  std::vector<std::size_t> t(true_supp.begin(), true_supp.end());
  std::vector<std::size_t> e(est_supp.begin(), est_supp.end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  std::vector<std::size_t> common;
  std::set_intersection(t.begin(), t.end(), e.begin(), e.end(), std::back_inserter(common));
  return 100.0 * static_cast<double>(common.size()) / static_cast<double>(t.size());
}

/// Indices of the nonzero entries of v.
inline std::vector<std::size_t> nonzero_support(std::span<const double> v) {
  std::vector<std::size_t> s;
  for (std::size_t j = 0; j < v.size(); ++j)
    if (v[j] != 0.0) s.push_back(j);
  return s;
}

}  // namespace onebit
