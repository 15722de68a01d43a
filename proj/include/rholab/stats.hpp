#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace rholab::stats {

// Streaming mean/variance (Welford) with an exact pairwise merge.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);

  std::uint64_t count() const { return count_; }
  double mean() const { return mean_; }
  double min() const { return min_; }
  double max() const { return max_; }
  // Sample (n - 1) standard deviation; 0 for fewer than two values.
  double stddev() const;
  // 1.96 * stddev / sqrt(count).
  double half_width_95() const;

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
};

// P(K > x) for the limiting Kolmogorov distribution.
double kolmogorov_survival(double x);

struct KsResult {
  double statistic;  // sup |F_a - F_b|
  double p_value;    // asymptotic, with Stephens' small-sample correction
  // Rejection threshold on the statistic at the requested significance.
  double critical_value;
  bool reject;
};

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       double alpha = 0.01);

struct ChiSquareResult {
  double statistic;
  unsigned dof;
  double p_value;
  double critical_value;
  bool reject;
};

// Pearson goodness of fit of `observed` against `expected_prob` (same
// length, probabilities summing to one).
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> expected_prob,
                               double alpha = 0.01);

}  // namespace rholab::stats
