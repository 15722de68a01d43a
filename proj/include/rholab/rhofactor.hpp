#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rholab/gformula.hpp"
#include "rholab/rng.hpp"

namespace rholab::rhofactor {

using gformula::MachineSpec;

inline constexpr std::uint64_t kMaxModulus = std::uint64_t{1} << 62;

// One run of x -> x^{2k} + c mod n starting at x0.
struct RhoTask {
  std::uint64_t n = 0;
  std::uint64_t k = 1;
  std::uint64_t c = 1;
  std::uint64_t x0 = 0;
  std::uint64_t max_iterations = 1'000'000;
  std::uint64_t batch_size = 128;

  // Throws DomainError unless n is odd in [3, 2^62), k >= 1,
  // c in [1, n) with c != n - 2, x0 < n and both limits positive.
  void validate() const;
};

enum class FactorStatus { kFound, kExhausted };

struct MachineReport {
  std::uint64_t k = 1;
  double lambda = 1.0;
  std::uint64_t iterations = 0;
  double weighted_cost = 0.0;
  std::uint64_t restarts = 0;
};

struct FactorOutcome {
  FactorStatus status = FactorStatus::kExhausted;
  std::uint64_t factor = 0;  // 1 < factor < n when found
  // Applications of the iteration map up to and including the step whose
  // difference first shared a factor with n (all map applications when
  // exhausted). Backtracking replays are not counted.
  std::uint64_t iterations = 0;
  double weighted_cost = 0.0;  // iterations * log2(2k)
  std::uint64_t restarts = 0;  // fresh (c, x0) draws after a gcd == n dead end
  std::size_t winner_index = 0;
  std::vector<MachineReport> machines;

  bool found() const { return status == FactorStatus::kFound; }
};

// base^exponent mod modulus by square-and-multiply with 128-bit products.
// DomainError for modulus < 2 or modulus >= 2^62.
std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exponent,
                      std::uint64_t modulus);

// c uniform on [1, n) minus {n - 2}, x0 uniform on [0, n).
RhoTask draw_task(std::uint64_t n, std::uint64_t k, Rng& rng,
                  std::uint64_t max_iterations, std::uint64_t batch_size = 128);

// Resumable Brent cycle search with batched gcds. Each round compares the
// anchor, fixed at positions 0, 1, 3, 7, ..., against the next r iterates
// (r = 1, 2, 4, ...). Differences are multiplied together and one gcd is
// taken per batch; any batch whose gcd exceeds 1 is replayed step by step.
// If the first such step already yields n, a new (c, x0) is drawn from the
// walker's generator and the search restarts.
class BrentWalker {
 public:
  BrentWalker(const RhoTask& task, Rng rng);

  // Advances by at most one batch. Returns true once the walk is finished.
  bool step();
  bool finished() const { return finished_; }

  std::uint64_t iterations() const { return iterations_; }
  double weighted_cost() const { return lambda_ * static_cast<double>(iterations_); }
  const RhoTask& task() const { return task_; }
  FactorOutcome outcome() const;

 private:
  std::uint64_t apply(std::uint64_t x) const;
  void restart();
  // Replays the batch that started at ys. Returns the first gcd above one.
  std::uint64_t replay(std::uint64_t steps, std::uint64_t& position);

  RhoTask task_;
  Rng rng_;
  double lambda_;
  std::uint64_t exponent_;
  std::uint64_t anchor_ = 0;
  std::uint64_t y_ = 0;
  std::uint64_t round_length_ = 1;
  std::uint64_t done_in_round_ = 0;
  std::uint64_t iterations_ = 0;
  std::uint64_t restarts_ = 0;
  std::uint64_t factor_ = 0;
  bool finished_ = false;
};

FactorOutcome pollard_rho_brent(const RhoTask& task, Rng& rng);

enum class Schedule {
  // One thread per machine; the first finder raises a stop flag that the
  // others observe at their next batch boundary.
  kThreaded,
  // Single thread; the machine with the smallest weighted cost so far runs
  // the next batch (ties to the lower index). Reproducible for a seed.
  kDeterministic,
};

// Machine i draws (c, x0) from make_stream(seed, i). With one machine the
// outcome equals pollard_rho_brent on that stream.
FactorOutcome parallel_factor(std::uint64_t n,
                              std::span<const MachineSpec> machines,
                              std::uint64_t seed, std::uint64_t max_iterations,
                              Schedule schedule = Schedule::kDeterministic,
                              std::uint64_t batch_size = 128);

// Exact rho length of x -> x^{2k} + c over Z/pZ from x0. p is an odd prime
// below 2^31. Any residue c is accepted here; heuristic_check only draws
// c outside {0, -2}.
std::uint64_t heuristic_rho_length(std::uint64_t p, std::uint64_t k,
                                   std::uint64_t c, std::uint64_t x0);

struct HeuristicReport {
  std::uint64_t p = 0;
  std::uint64_t k = 0;
  std::uint64_t d = 0;  // gcd(p - 1, 2k)
  std::uint64_t trials = 0;
  double empirical_mean = 0.0;
  double model_mean = 0.0;
  double ratio = 0.0;
  double half_width_95 = 0.0;  // of the ratio
  // Supplementary: two-sample KS against the direct sampler of the model.
  double ks_statistic = 0.0;
  double ks_p_value = 0.0;
};

// Compares the mean rho length of the real map over random (c, x0) with
// the exact mean of the F_{p-1}^d model.
HeuristicReport heuristic_check(std::uint64_t p, std::uint64_t k,
                                std::uint64_t trials, std::uint64_t seed);

// Raw rho lengths for random (c, x0), in draw order.
std::vector<double> heuristic_samples(std::uint64_t p, std::uint64_t k,
                                      std::uint64_t trials, std::uint64_t seed);

}  // namespace rholab::rhofactor
