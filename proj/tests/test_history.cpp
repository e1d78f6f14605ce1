#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "onebit/history.hpp"

namespace onebit {
namespace {

std::size_t nnz(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double e) { return e != 0.0; }));
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

TEST(HistoryRecover, NoiselessSingleSpike) {
  std::vector<double> e5(20, 0.0);
  e5[5] = 1.0;
  const SparseSignal x(e5);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng r(seed);
    const auto a = gen_measurement_matrix(2000, 20, r);
    const auto res = history_recover(measure(a, x), a, HistoryParams{1, AdaptiveAlpha{}});
    ASSERT_TRUE(res.ok());
    good += res.support == std::vector<std::size_t>{5} && recovery_error(x, res.x_star) < 0.05;
  }
  EXPECT_GE(good, 95);
}

TEST(HistoryRecover, AlphaOneSkipsThreshold) {
  Rng r(50);
  for (int t = 0; t < 20; ++t) {
    const auto x = gen_sparse_signal(100, 7, r);
    const auto a = gen_measurement_matrix(300, 100, r);
    const auto y = apply_sign_flips(measure(a, x), 0.1, r);
    const auto res = history_recover(y, a, HistoryParams{7, FixedAlpha{1.0}});
    ASSERT_TRUE(res.ok());
    EXPECT_EQ(res.candidate_support.target_size, 7u);
    EXPECT_EQ(res.support.size(), 7u);
    EXPECT_EQ(res.support, res.candidate_support.indices);
  }
}

TEST(HistoryRecover, OutputInvariants) {
  Rng r(51);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 20 + r.uniform_index(200);
    const std::size_t k = 1 + r.uniform_index(10);
    const std::size_t m = k + 2 + r.uniform_index(400);
    const auto x = gen_sparse_signal(n, k, r);
    const auto a = gen_measurement_matrix(m, n, r);
    const auto y = apply_sign_flips(measure(a, x), 0.3 * r.uniform(), r);
    const AlphaMode mode = r.uniform() < 0.5 ? AlphaMode{AdaptiveAlpha{}} : AlphaMode{FixedAlpha{1.0 + 5.0 * r.uniform()}};
    const auto res = history_recover(y, a, HistoryParams{k, mode});
    ASSERT_TRUE(res.ok()) << res.message;
    EXPECT_NEAR(norm2(res.x_star), 1.0, 1e-12);
    EXPECT_LE(nnz(res.x_star), k);
    EXPECT_TRUE(std::includes(res.candidate_support.indices.begin(), res.candidate_support.indices.end(),
                              res.support.begin(), res.support.end()));
    EXPECT_GE(res.candidate_support.target_size, k);
    EXPECT_LT(res.candidate_support.target_size, m);
    const bool no_zero_coeff = std::none_of(res.coefficients.begin(), res.coefficients.end(), [](double c) { return c == 0.0; });
    if (no_zero_coeff) EXPECT_EQ(nnz(res.x_star), k);
  }
}

TEST(HistoryRecover, DeterministicAndNoiseLevelFree) {
  Rng r(52);
  const auto x = gen_sparse_signal(200, 5, r);
  const auto a = gen_measurement_matrix(400, 200, r);
  const auto y = apply_sign_flips(measure(a, x), 0.2, r);
  // Same bits, different recorded flip ratio: nothing downstream may read it.
  const BitMeasurements relabelled(y.bits(), 0.0);
  const HistoryParams p{5, AdaptiveAlpha{}};
  const auto r1 = history_recover(y, a, p);
  const auto r2 = history_recover(y, a, p);
  const auto r3 = history_recover(relabelled, a, p);
  EXPECT_EQ(r1.x_star, r2.x_star);
  EXPECT_EQ(r1.x_star, r3.x_star);
  EXPECT_EQ(r1.candidate_support.ranked, r3.candidate_support.ranked);
  EXPECT_EQ(r1.coefficients, r3.coefficients);
}

TEST(HistoryRecover, Preconditions) {
  Rng r(53);
  const auto x = gen_sparse_signal(10, 3, r);
  const auto a = gen_measurement_matrix(4, 10, r);
  const auto y = measure(a, x);
  EXPECT_THROW(history_recover(y, a, HistoryParams{4, AdaptiveAlpha{}}), error);  // k > m - 1
  EXPECT_THROW(history_recover(y, a, HistoryParams{2, FixedAlpha{0.5}}), error);
  EXPECT_THROW(history_recover(y, a, HistoryParams{2, AdaptiveAlpha{4.0, 0.0}}), error);
  EXPECT_THROW(history_recover(BitMeasurements(std::vector<std::int8_t>{1}), a, HistoryParams{1}), error);
}

TEST(HistoryRecover, RankDeficiencyIsAStatus) {
  // Two identical columns that both look like the best candidates.
  const std::size_t m = 30;
  Rng r(54);
  std::vector<double> entries;
  std::vector<std::int8_t> bits(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double v = r.normal();
    bits[i] = v >= 0.0 ? 1 : -1;
    entries.insert(entries.end(), {v, v, 0.01 * r.normal()});
  }
  const MeasurementEnsemble a(m, 3, entries);
  const auto res = history_recover(BitMeasurements(bits), a, HistoryParams{2, FixedAlpha{1.0}});
  EXPECT_EQ(res.status, RecoveryStatus::rank_deficient);
  EXPECT_EQ(res.x_star, std::vector<double>(3, 0.0));
  EXPECT_FALSE(res.message.empty());
}

TEST(HistoryRecoverWithSupport, TrueSupportBeatsRandomSupport) {
  Rng r(55);
  double err_true = 0.0, err_random = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto x = gen_sparse_signal(100, 5, r);
    const auto a = gen_measurement_matrix(500, 100, r);
    const auto y = measure(a, x);
    err_true += recovery_error(x, history_recover_with_support(y, a, x.support(), 5).x_star);
    std::vector<std::size_t> random_supp;
    while (random_supp.size() < 5) {
      const std::size_t j = r.uniform_index(100);
      if (std::find(random_supp.begin(), random_supp.end(), j) == random_supp.end()) random_supp.push_back(j);
    }
    err_random += recovery_error(x, history_recover_with_support(y, a, random_supp, 5).x_star);
  }
  EXPECT_LT(err_true, err_random);
}

TEST(HistoryRecoverWithSupport, DisjointSupportLeavesTrueSupportEmpty) {
  Rng r(56);
  const auto x = gen_sparse_signal(30, 3, r);
  const auto a = gen_measurement_matrix(100, 30, r);
  std::vector<std::size_t> other;
  for (std::size_t j = 0; j < 30 && other.size() < 6; ++j)
    if (std::find(x.support().begin(), x.support().end(), j) == x.support().end()) other.push_back(j);
  const auto res = history_recover_with_support(measure(a, x), a, other, 3);
  ASSERT_TRUE(res.ok());
  for (std::size_t j : x.support()) EXPECT_EQ(res.x_star[j], 0.0);
  EXPECT_EQ(nnz(res.x_star), 3u);
}

TEST(HistoryRecoverWithSupport, SupportMustBeSmallerThanM) {
  Rng r(57);
  const auto x = gen_sparse_signal(10, 2, r);
  const auto a = gen_measurement_matrix(4, 10, r);
  EXPECT_THROW(history_recover_with_support(measure(a, x), a, std::vector<std::size_t>{0, 1, 2, 3}, 2), error);
}

// Relabelling coordinates relabels the output bit for bit. Exhaustive over
// all 8! permutations; the instance is chosen so that the top candidate
// magnitudes are distinct (the tie rule is index based and would otherwise
// interact with the relabelling).
TEST(HistoryProperty, PermutationEquivariance) {
  const std::size_t n = 8, m = 200, k = 2;
  const HistoryParams params{k, FixedAlpha{2.0}};
  std::uint64_t seed = 0;
  for (;; ++seed) {
    Rng r(seed);
    const auto x = gen_sparse_signal(n, k, r);
    const auto a = gen_measurement_matrix(m, n, r);
    const auto y = apply_sign_flips(measure(a, x), 0.1, r);
    auto h = estimate_proxy(y, a).h;
    for (double& v : h) v = std::abs(v);
    std::sort(h.begin(), h.end(), std::greater<>());
    if (std::adjacent_find(h.begin(), h.begin() + 5) == h.begin() + 5) break;
  }
  Rng r(seed);
  const auto x = gen_sparse_signal(n, k, r);
  const auto a = gen_measurement_matrix(m, n, r);
  const auto y = apply_sign_flips(measure(a, x), 0.1, r);
  const auto base = history_recover(y, a, params);
  ASSERT_TRUE(base.ok());

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::size_t checked = 0;
  do {
    std::vector<double> entries(m * n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < n; ++p) entries[i * n + p] = a(i, perm[p]);
    const auto res = history_recover(y, MeasurementEnsemble(m, n, std::move(entries)), params);
    ASSERT_TRUE(res.ok());
    for (std::size_t p = 0; p < n; ++p) ASSERT_EQ(res.x_star[p], base.x_star[perm[p]]);
    ++checked;
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(checked, 40320u);
}

// 100-trial means over K at N = 1000, M = 4000, rho = 0.1.
TEST(HistoryTrend, ErrorNonDecreasingInK) {
  double previous = 0.0;
  for (std::size_t k : {10, 50, 100, 200}) {
    double total = 0.0;
    for (std::uint64_t t = 0; t < 100; ++t) {
      Rng r(hash_combine(900 + k, t));
      const auto x = gen_sparse_signal(1000, k, r);
      const auto a = gen_measurement_matrix(4000, 1000, r);
      const auto y = apply_sign_flips(measure(a, x), 0.1, r);
      const auto res = history_recover(y, a, HistoryParams{k, AdaptiveAlpha{}});
      total += res.ok() ? recovery_error(x, res.x_star) : 1.0;
    }
    const double mean = total / 100.0;
    EXPECT_GE(mean, previous) << "k=" << k;
    previous = mean;
  }
}

}  // namespace
}  // namespace onebit
