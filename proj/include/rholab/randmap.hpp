#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rholab/rng.hpp"

namespace rholab::randmap {

// A function on Z/nZ in which every value has 0 or exactly d preimages.
struct TabulatedFunction {
  std::uint64_t n = 0;
  std::uint64_t d = 0;
  std::vector<std::uint32_t> images;

  std::uint32_t operator()(std::uint32_t x) const { return images[x]; }

  // Preimage count of every value.
  std::vector<std::uint64_t> indegrees() const;
  // True when exactly n/d values have indegree d and the rest have none.
  bool is_valid() const;
};

// Collision model for one machine: the rho length S stops at step s with
// probability s/q given that it reached s, q = n/(d - 1).
struct RhoModel {
  std::uint64_t n = 0;
  std::uint64_t d = 0;
  double q = 1.0;

  // d >= 2 (DomainError otherwise). Divisibility is not required here.
  static RhoModel from_nd(std::uint64_t n, std::uint64_t d);
  // A model given by q alone (n and d left zero).
  static RhoModel from_q(double q);
};

struct TrialBatch {
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  unsigned streams = 1;
  double mean = 0.0;
  double half_width_95 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

enum class SampleMode { kDirect, kFullMap };

inline constexpr std::uint64_t kMaxMapSize = 10'000'000;
inline constexpr std::uint64_t kMaxFullMapTrialSize = 1'000'000;
inline constexpr double kMaxExactQ = 1e7;

// Uniform element of F_n^d: a random permutation of the domain cut into n/d
// blocks of d, each block sent to its own value of a random injection.
// Requires d >= 2, d | n, n <= 10^7.
TabulatedFunction sample_f_nd(std::uint64_t n, std::uint64_t d, Rng& rng);

// Number of distinct values in x, f(x), f(f(x)), ...
std::uint64_t rho_length(const TabulatedFunction& f, std::uint32_t x);

// P(S = s) = min(s/q, 1) * prod_{j=1}^{s-1} (1 - j/q), zero past ceil(q).
double exact_pmf(const RhoModel& model, std::uint64_t s);

// Sum of the pmf over its support; one up to rounding.
double pmf_total(const RhoModel& model);

// E[S] by direct summation. CapacityError for q > 10^7.
double exact_mean(const RhoModel& model);

// Exact E[min_i lambda_i S_i] for independent machines, integrating the
// product of the per-machine survival functions over their merged step
// points.
double exact_min_mean(std::uint64_t n, std::span<const std::uint64_t> ds,
                      std::span<const double> lambdas);

// Draws S by Bernoulli trials with stop probability min(s/q, 1) at step s.
std::uint64_t sample_rho_direct(const RhoModel& model, Rng& rng);

double rayleigh_pdf(double q, double s);

// sqrt(pi n / 2) * (sum_i (d_i - 1) / lambda_i^2)^(-1/2).
double theorem1_rhs(std::uint64_t n, std::span<const std::uint64_t> ds,
                    std::span<const double> lambdas);

// Monte-Carlo estimate of E[min_i lambda_i S_i]. Trials are split into
// `streams` contiguous blocks, stream w seeded with stream_seed(seed, w), and
// merged in stream order; the result depends on (seed, streams) only.
TrialBatch estimate_min_expectation(std::uint64_t n,
                                    std::span<const std::uint64_t> ds,
                                    std::span<const double> lambdas,
                                    std::uint64_t trials, std::uint64_t seed,
                                    SampleMode mode, unsigned streams = 1);

// Raw single-machine rho lengths under either sampler, in stream order.
std::vector<double> sample_rho_lengths(std::uint64_t n, std::uint64_t d,
                                       std::uint64_t trials,
                                       std::uint64_t seed, SampleMode mode,
                                       unsigned streams = 1);

}  // namespace rholab::randmap
