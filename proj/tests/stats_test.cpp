#include "rholab/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rholab/rng.hpp"

namespace rholab::stats {
namespace {

TEST(RunningStats, MatchesTwoPassFormulas) {
  const std::vector<double> xs = {3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5};
  RunningStats s;
  for (const double x : xs) s.add(x);
  double mean = 0;
  for (const double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  EXPECT_NEAR(s.mean(), mean, 1e-14);
  EXPECT_NEAR(s.stddev(), sd, 1e-14);
  EXPECT_NEAR(s.half_width_95(), 1.96 * sd / std::sqrt(11.0), 1e-14);
  EXPECT_EQ(s.min(), 1.0);
  EXPECT_EQ(s.max(), 9.0);
}

TEST(RunningStats, MergeEqualsSequential) {
  Rng rng(3);
  RunningStats all, left, right;
  for (int i = 0; i < 1000; ++i) {
    const double x = uniform01(rng) * 100.0;
    all.add(x);
    (i < 377 ? left : right).add(x);
  }
  left.merge(right);
  EXPECT_EQ(left.count(), all.count());
  EXPECT_NEAR(left.mean(), all.mean(), 1e-12);
  EXPECT_NEAR(left.stddev(), all.stddev(), 1e-10);
  EXPECT_EQ(left.min(), all.min());
  EXPECT_EQ(left.max(), all.max());
}

TEST(Kolmogorov, KnownQuantiles) {
  // Tabulated upper quantiles of the Kolmogorov distribution.
  EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(kolmogorov_survival(1.6276), 0.01, 1e-4);
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(KsTwoSample, IdenticalAndShiftedSamples) {
  Rng rng(11);
  std::vector<double> a, b, shifted;
  for (int i = 0; i < 5000; ++i) {
    a.push_back(uniform01(rng));
    b.push_back(uniform01(rng));
    shifted.push_back(uniform01(rng) + 0.1);
  }
  EXPECT_EQ(ks_two_sample(a, a).statistic, 0.0);
  EXPECT_FALSE(ks_two_sample(a, b).reject);
  const KsResult r = ks_two_sample(a, shifted);
  EXPECT_TRUE(r.reject);
  EXPECT_NEAR(r.statistic, 0.1, 0.03);
}

TEST(KsTwoSample, TiesAdvanceTogether) {
  const std::vector<double> a = {1, 1, 2, 2};
  const std::vector<double> b = {1, 2, 2, 2};
  // F_a(1) = 0.5, F_b(1) = 0.25; both reach 1 at 2.
  EXPECT_DOUBLE_EQ(ks_two_sample(a, b).statistic, 0.25);
}

TEST(ChiSquare, HandComputedStatistic) {
  const std::uint64_t obs[] = {10, 20};
  const double p[] = {0.5, 0.5};
  const ChiSquareResult r = chi_square_gof(obs, p);
  EXPECT_NEAR(r.statistic, 10.0 / 3.0, 1e-12);
  EXPECT_EQ(r.dof, 1u);
  EXPECT_NEAR(r.p_value, 0.0679, 1e-4);
  EXPECT_NEAR(r.critical_value, 6.6349, 1e-4);
  EXPECT_FALSE(r.reject);
}

}  // namespace
}  // namespace rholab::stats
