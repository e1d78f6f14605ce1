#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "signal_model.hpp"

namespace onebit {

/// Columns of a measurement matrix in a caller-chosen order. The order fixes
/// the column order of the factorization and of the returned coefficients.
class SubmatrixView {
 public:
  SubmatrixView(const MeasurementEnsemble& source, std::vector<std::size_t> columns)
      : source_(&source), columns_(std::move(columns)) {
    if (columns_.empty()) throw error(errc::invalid_dimension, "submatrix needs at least one column");
    if (columns_.size() >= source.m())
      throw error(errc::precondition, "submatrix needs fewer columns than rows");
    for (std::size_t c : columns_)
      if (c >= source.n()) throw error(errc::out_of_range, "submatrix column index out of range");
  }

  const MeasurementEnsemble& source() const noexcept { return *source_; }
  const std::vector<std::size_t>& columns() const noexcept { return columns_; }
  std::size_t rows() const noexcept { return source_->m(); }
  std::size_t cols() const noexcept { return columns_.size(); }
  double operator()(std::size_t i, std::size_t c) const { return (*source_)(i, columns_[c]); }

  /// Column-major copy.
  std::vector<double> dense() const {
    const std::size_t m = rows();
    std::vector<double> out(m * cols());
    for (std::size_t i = 0; i < m; ++i) {
      const auto row = source_->row(i);
      for (std::size_t c = 0; c < cols(); ++c) out[c * m + i] = row[columns_[c]];
    }
    return out;
  }

 private:
  const MeasurementEnsemble* source_;
  std::vector<std::size_t> columns_;
};

/// Householder QR without pivoting, A = Q R with R upper triangular s x s.
/// Reflector k is v_k (zero above row k) with H_k = I - beta_k v_k v_k^T.
class QrFactorization {
 public:
  static constexpr double kRankTolerance = 1e-10;

  explicit QrFactorization(const SubmatrixView& a) : m_(a.rows()), s_(a.cols()) {
    std::vector<double> work = a.dense();
    reflectors_.assign(m_ * s_, 0.0);
    beta_.assign(s_, 0.0);
    r_.assign(s_ * s_, 0.0);

    for (std::size_t k = 0; k < s_; ++k) {
      double* col = work.data() + k * m_;
      double sq = 0.0;
      for (std::size_t i = k; i < m_; ++i) sq += col[i] * col[i];
      const double norm = std::sqrt(sq);
      double* v = reflectors_.data() + k * m_;
      if (norm == 0.0) {
        r_at(k, k) = 0.0;
        continue;
      }
      const double alpha = col[k] >= 0.0 ? -norm : norm;
      for (std::size_t i = k; i < m_; ++i) v[i] = col[i];
      v[k] -= alpha;
      double vv = 0.0;
      for (std::size_t i = k; i < m_; ++i) vv += v[i] * v[i];
      beta_[k] = vv > 0.0 ? 2.0 / vv : 0.0;
      r_at(k, k) = alpha;
      for (std::size_t j = k + 1; j < s_; ++j) {
        double* cj = work.data() + j * m_;
        double dot = 0.0;
        for (std::size_t i = k; i < m_; ++i) dot += v[i] * cj[i];
        const double f = beta_[k] * dot;
        for (std::size_t i = k; i < m_; ++i) cj[i] -= f * v[i];
        r_at(k, j) = cj[k];
      }
    }
  }

  std::size_t rows() const noexcept { return m_; }
  std::size_t cols() const noexcept { return s_; }

  /// R entry (i, j), zero below the diagonal.
  double r(std::size_t i, std::size_t j) const { return r_[i * s_ + j]; }

  /// Q^T b.
  std::vector<double> apply_qt(std::span<const double> b) const {
    if (b.size() != m_) throw error(errc::dimension_mismatch, "apply_qt: length mismatch");
    std::vector<double> out(b.begin(), b.end());
    for (std::size_t k = 0; k < s_; ++k) reflect(k, out);
    return out;
  }

  /// Q R as a column-major m x s matrix.
  std::vector<double> reconstruct() const {
    std::vector<double> out(m_ * s_, 0.0);
    for (std::size_t j = 0; j < s_; ++j) {
      std::vector<double> col(m_, 0.0);
      for (std::size_t i = 0; i <= j; ++i) col[i] = r(i, j);
      for (std::size_t k = s_; k-- > 0;) reflect(k, col);
      std::copy(col.begin(), col.end(), out.begin() + static_cast<std::ptrdiff_t>(j * m_));
    }
    return out;
  }

  bool rank_deficient() const noexcept {
    double max_diag = 0.0;
    for (std::size_t k = 0; k < s_; ++k) max_diag = std::max(max_diag, std::abs(r(k, k)));
    if (max_diag == 0.0) return true;
    for (std::size_t k = 0; k < s_; ++k)
      if (std::abs(r(k, k)) < kRankTolerance * max_diag) return true;
    return false;
  }

  /// Least-squares solution of A c = b. Throws rank_deficient.
  std::vector<double> solve(std::span<const double> b) const {
    if (rank_deficient()) throw error(errc::rank_deficient, "R has a negligible diagonal entry");
    std::vector<double> qtb = apply_qt(b);
    std::vector<double> c(s_);
    for (std::size_t k = s_; k-- > 0;) {
      double acc = qtb[k];
      for (std::size_t j = k + 1; j < s_; ++j) acc -= r(k, j) * c[j];
      c[k] = acc / r(k, k);
    }
    return c;
  }

 private:
  double& r_at(std::size_t i, std::size_t j) { return r_[i * s_ + j]; }

  void reflect(std::size_t k, std::vector<double>& x) const {
    if (beta_[k] == 0.0) return;
    const double* v = reflectors_.data() + k * m_;
    double dot = 0.0;
    for (std::size_t i = k; i < m_; ++i) dot += v[i] * x[i];
    const double f = beta_[k] * dot;
    for (std::size_t i = k; i < m_; ++i) x[i] -= f * v[i];
  }

  std::size_t m_;
  std::size_t s_;
  std::vector<double> reflectors_;
  std::vector<double> beta_;
  std::vector<double> r_;
};

/// Numerical rank by Householder QR with column pivoting. Only used to
/// annotate rank-deficiency errors.
inline std::size_t numerical_rank(const SubmatrixView& a, double rel_tol = QrFactorization::kRankTolerance) {
  const std::size_t m = a.rows(), s = a.cols();
  std::vector<double> w = a.dense();
  std::vector<double> norms(s);
  for (std::size_t j = 0; j < s; ++j) {
    double sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) sq += w[j * m + i] * w[j * m + i];
    norms[j] = sq;
  }
  double first = 0.0;
  std::size_t rank = 0;
  for (std::size_t k = 0; k < s; ++k) {
    std::size_t p = k;
    for (std::size_t j = k + 1; j < s; ++j)
      if (norms[j] > norms[p]) p = j;
    if (p != k) {
      std::swap_ranges(w.begin() + static_cast<std::ptrdiff_t>(k * m), w.begin() + static_cast<std::ptrdiff_t>((k + 1) * m),
                       w.begin() + static_cast<std::ptrdiff_t>(p * m));
      std::swap(norms[k], norms[p]);
    }
    double* col = w.data() + k * m;
    double sq = 0.0;
    for (std::size_t i = k; i < m; ++i) sq += col[i] * col[i];
    const double norm = std::sqrt(sq);
    if (k == 0) first = norm;
    if (norm <= rel_tol * first || norm == 0.0) break;
    ++rank;
    const double alpha = col[k] >= 0.0 ? -norm : norm;
    std::vector<double> v(col + k, col + m);
    v[0] -= alpha;
    double vv = 0.0;
    for (double e : v) vv += e * e;
    const double beta = 2.0 / vv;
    for (std::size_t j = k; j < s; ++j) {
      double* cj = w.data() + j * m;
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += v[i - k] * cj[i];
      for (std::size_t i = k; i < m; ++i) cj[i] -= beta * dot * v[i - k];
      // downdate remaining norm of column j below row k
      norms[j] = 0.0;
      for (std::size_t i = k + 1; i < m; ++i) norms[j] += cj[i] * cj[i];
    }
  }
  return rank;
}

/// argmin_c ||rhs - A_S c||_2 via Householder QR.
inline std::vector<double> left_divide(const SubmatrixView& a_s, std::span<const double> rhs) {
  if (rhs.size() != a_s.rows()) throw error(errc::dimension_mismatch, "left_divide: rhs length != rows");
  QrFactorization qr(a_s);
  if (qr.rank_deficient()) {
    throw error(errc::rank_deficient, "columns are numerically dependent (pivoted rank " +
                                          std::to_string(numerical_rank(a_s)) + " of " +
                                          std::to_string(a_s.cols()) + ")");
  }
  return qr.solve(rhs);
}

inline std::vector<double> left_divide(const SubmatrixView& a_s, const BitMeasurements& y) {
  const auto rhs = y.as_real();
  return left_divide(a_s, std::span<const double>(rhs));
}

/// Keeps the k largest magnitudes; ties go to the smaller index.
inline std::vector<double> hard_threshold(std::span<const double> v, std::size_t k) {
  if (k < 1 || k > v.size()) throw error(errc::invalid_parameter, "hard_threshold: need 1 <= k <= length");
  std::vector<std::size_t> order(v.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double ma = std::abs(v[a]), mb = std::abs(v[b]);
                      if (ma != mb) return ma > mb;
                      return a < b;
                    });
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 0; i < k; ++i) out[order[i]] = v[order[i]];
  return out;
}

inline std::vector<double> normalize(std::span<const double> v) {
  double sq = 0.0;
  for (double e : v) sq += e * e;
  if (!(sq > 0.0)) throw error(errc::zero_vector, "cannot normalize a zero vector");
  const double norm = std::sqrt(sq);
  std::vector<double> out(v.begin(), v.end());
  for (double& e : out) e /= norm;
  return out;
}

}  // namespace onebit
