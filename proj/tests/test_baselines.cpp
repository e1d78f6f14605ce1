#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "onebit/baselines.hpp"

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

TEST(Biht, NoiselessSingleSpike) {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng r(seed);
    const auto x = gen_sparse_signal(20, 1, r);
    const auto a = gen_measurement_matrix(2000, 20, r);
    const auto res = biht_l2_recover(measure(a, x), a, BihtParams{1});
    good += res.ok() && res.support == x.support();
  }
  EXPECT_GE(good, 90);
}

TEST(Biht, ParameterValidation) {
  Rng r(1);
  const auto x = gen_sparse_signal(10, 2, r);
  const auto a = gen_measurement_matrix(20, 10, r);
  const auto y = measure(a, x);
  EXPECT_THROW(biht_l2_recover(y, a, BihtParams{2, 0}), error);
  EXPECT_THROW(biht_l2_recover(y, a, BihtParams{2, 10, 0.0}), error);
  EXPECT_THROW(biht_l2_recover(y, a, BihtParams{0}), error);
  EXPECT_THROW(biht_l2_recover(y, a, BihtParams{11}), error);
}

TEST(Biht, ObjectiveTraceDecreasesAndOutputIsValid) {
  Rng r(2);
  for (int t = 0; t < 20; ++t) {
    const std::size_t k = 1 + r.uniform_index(8);
    const auto x = gen_sparse_signal(80, k, r);
    const auto a = gen_measurement_matrix(300, 80, r);
    const auto y = apply_sign_flips(measure(a, x), 0.05, r);
    const auto res = biht_l2_recover(y, a, BihtParams{k, 60, 1.0, false});
    ASSERT_TRUE(res.ok());
    EXPECT_EQ(res.iterations, 60u);
    for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
      EXPECT_LT(res.objective_trace[i], res.objective_trace[i - 1]);
    EXPECT_NEAR(norm2(res.x_star), 1.0, 1e-12);
    EXPECT_LE(nnz(res.x_star), k);
  }
}

TEST(Biht, StallStopEndsEarly) {
  Rng r(3);
  const auto x = gen_sparse_signal(50, 3, r);
  const auto a = gen_measurement_matrix(400, 50, r);
  const auto y = apply_sign_flips(measure(a, x), 0.3, r);
  const auto res = biht_l2_recover(y, a, BihtParams{3, 500});
  EXPECT_TRUE(res.ok());
  EXPECT_LT(res.iterations, 500u);
  // every iterate before the stalled one improved on its predecessor
  EXPECT_EQ(res.objective_trace.size(), res.iterations - 1);
}

TEST(Passive, GammaFormula) {
  const auto p = PassiveParams::for_dimensions(10, 1000, 4000);
  EXPECT_DOUBLE_EQ(p.gamma, std::sqrt(std::log(1000.0) / 4000.0));
  EXPECT_THROW((PassiveParams{3, 0.0}.validate()), error);
}

TEST(Passive, DominantCoordinateSelected) {
  const std::size_t m = 100, n = 5;
  Rng r(4);
  std::vector<std::int8_t> bits(m);
  std::vector<double> entries(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    bits[i] = r.uniform() < 0.5 ? 1 : -1;
    for (std::size_t j = 0; j < n; ++j) entries[i * n + j] = 0.01 * r.normal();
    entries[i * n + 3] = 2.0 * bits[i];
  }
  const auto res = passive_recover(BitMeasurements(bits), MeasurementEnsemble(m, n, entries),
                                   PassiveParams{1, 0.05});
  ASSERT_TRUE(res.ok());
  EXPECT_EQ(res.support, std::vector<std::size_t>{3});
  EXPECT_DOUBLE_EQ(res.x_star[3], 1.0);
}

TEST(Passive, GammaAboveAllScoresFails) {
  Rng r(5);
  const auto x = gen_sparse_signal(30, 3, r);
  const auto a = gen_measurement_matrix(100, 30, r);
  const auto res = passive_recover(measure(a, x), a, PassiveParams{3, 1e6});
  EXPECT_EQ(res.status, RecoveryStatus::zero_vector);
  EXPECT_EQ(res.x_star, std::vector<double>(30, 0.0));
}

TEST(Passive, OutputValidAndDeterministic) {
  Rng r(6);
  for (int t = 0; t < 20; ++t) {
    const std::size_t k = 1 + r.uniform_index(10);
    const auto x = gen_sparse_signal(200, k, r);
    const auto a = gen_measurement_matrix(800, 200, r);
    const auto y = apply_sign_flips(measure(a, x), 0.1, r);
    const auto p = PassiveParams::for_dimensions(k, 200, 800);
    const auto r1 = passive_recover(y, a, p);
    const auto r2 = passive_recover(y, a, p);
    ASSERT_TRUE(r1.ok());
    EXPECT_EQ(r1.x_star, r2.x_star);
    EXPECT_NEAR(norm2(r1.x_star), 1.0, 1e-12);
    EXPECT_LE(nnz(r1.x_star), k);
    EXPECT_EQ(r1.iterations, 1u);
  }
}

}  // namespace
}  // namespace onebit
