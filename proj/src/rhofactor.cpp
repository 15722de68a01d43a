#include "rholab/rhofactor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "rholab/errors.hpp"
#include "rholab/numtheory.hpp"
#include "rholab/randmap.hpp"
#include "rholab/stats.hpp"

namespace rholab::rhofactor {

namespace {

std::uint64_t abs_diff(std::uint64_t a, std::uint64_t b) {
  return a > b ? a - b : b - a;
}

// Uniform on [1, n) without n - 2; n >= 3.
std::uint64_t draw_c(std::uint64_t n, Rng& rng) {
  std::uint64_t c = 1 + uniform_below(rng, n - 2);
  if (c >= n - 2) ++c;
  return c;
}

}  // namespace

void RhoTask::validate() const {
  if (n < 3 || n >= kMaxModulus || n % 2 == 0) {
    throw DomainError("modulus must be odd and in [3, 2^62), got " +
                      std::to_string(n));
  }
  if (k == 0) throw DomainError("exponent k must be >= 1");
  if (c == 0 || c >= n || c == n - 2) {
    throw DomainError("c must be a residue other than 0 and -2");
  }
  if (x0 >= n) throw DomainError("start value must be reduced mod n");
  if (max_iterations == 0) throw DomainError("max_iterations must be positive");
  if (batch_size == 0) throw DomainError("batch_size must be positive");
}

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exponent,
                      std::uint64_t modulus) {
  if (modulus < 2 || modulus >= kMaxModulus) {
    throw DomainError("mod_pow: modulus must be in [2, 2^62)");
  }
  return numtheory::pow_mod(base, exponent, modulus);
}

RhoTask draw_task(std::uint64_t n, std::uint64_t k, Rng& rng,
                  std::uint64_t max_iterations, std::uint64_t batch_size) {
  RhoTask task;
  task.n = n;
  task.k = k;
  task.max_iterations = max_iterations;
  task.batch_size = batch_size;
  if (n < 3 || n >= kMaxModulus || n % 2 == 0) {
    throw DomainError("modulus must be odd and in [3, 2^62), got " +
                      std::to_string(n));
  }
  task.c = draw_c(n, rng);
  task.x0 = uniform_below(rng, n);
  task.validate();
  return task;
}

BrentWalker::BrentWalker(const RhoTask& task, Rng rng)
    : task_(task), rng_(std::move(rng)) {
  task_.validate();
  lambda_ = gformula::MachineSpec::from_k(task_.k).lambda;
  exponent_ = 2 * task_.k;
  anchor_ = y_ = task_.x0;
}

std::uint64_t BrentWalker::apply(std::uint64_t x) const {
  const std::uint64_t v = numtheory::pow_mod(x, exponent_, task_.n) + task_.c;
  return v >= task_.n ? v - task_.n : v;
}

void BrentWalker::restart() {
  ++restarts_;
  task_.c = draw_c(task_.n, rng_);
  task_.x0 = uniform_below(rng_, task_.n);
  anchor_ = y_ = task_.x0;
  round_length_ = 1;
  done_in_round_ = 0;
}

std::uint64_t BrentWalker::replay(std::uint64_t steps, std::uint64_t& position) {
  for (std::uint64_t i = 0; i < steps; ++i) {
    y_ = apply(y_);
    ++position;
    const std::uint64_t g = std::gcd(abs_diff(anchor_, y_), task_.n);
    if (g > 1) return g;
  }
  return 1;
}

bool BrentWalker::step() {
  if (finished_) return true;
  const std::uint64_t budget = task_.max_iterations - iterations_;
  const std::uint64_t steps = std::min(
      {task_.batch_size, round_length_ - done_in_round_, budget});
  const std::uint64_t batch_start = y_;
  std::uint64_t product = 1;
  for (std::uint64_t i = 0; i < steps; ++i) {
    y_ = apply(y_);
    product = numtheory::mul_mod(product, abs_diff(anchor_, y_), task_.n);
  }
  const std::uint64_t g = std::gcd(product, task_.n);
  if (g == 1) {
    iterations_ += steps;
    done_in_round_ += steps;
    if (done_in_round_ == round_length_) {
      anchor_ = y_;
      round_length_ *= 2;
      done_in_round_ = 0;
    }
    if (iterations_ >= task_.max_iterations) finished_ = true;
    return finished_;
  }
  // Locate the first step of the batch that shares a factor with n.
  y_ = batch_start;
  std::uint64_t position = iterations_;
  const std::uint64_t first = replay(steps, position);
  if (first != task_.n) {
    iterations_ = position;
    factor_ = first;
    finished_ = true;
    return true;
  }
  iterations_ = position;
  if (iterations_ >= task_.max_iterations) {
    finished_ = true;
    return true;
  }
  restart();
  return false;
}

FactorOutcome BrentWalker::outcome() const {
  FactorOutcome out;
  out.status = factor_ != 0 ? FactorStatus::kFound : FactorStatus::kExhausted;
  out.factor = factor_;
  out.iterations = iterations_;
  out.weighted_cost = weighted_cost();
  out.restarts = restarts_;
  out.winner_index = 0;
  out.machines.push_back(
      {task_.k, lambda_, iterations_, weighted_cost(), restarts_});
  return out;
}

FactorOutcome pollard_rho_brent(const RhoTask& task, Rng& rng) {
  BrentWalker walker(task, rng);
  while (!walker.step()) {
  }
  return walker.outcome();
}

FactorOutcome parallel_factor(std::uint64_t n,
                              std::span<const MachineSpec> machines,
                              std::uint64_t seed, std::uint64_t max_iterations,
                              Schedule schedule, std::uint64_t batch_size) {
  if (machines.empty()) throw DomainError("at least one machine is required");
  std::vector<BrentWalker> walkers;
  walkers.reserve(machines.size());
  for (std::size_t i = 0; i < machines.size(); ++i) {
    Rng rng = make_stream(seed, i);
    const RhoTask task =
        draw_task(n, machines[i].k, rng, max_iterations, batch_size);
    walkers.emplace_back(task, std::move(rng));
  }

  constexpr std::size_t kNoWinner = static_cast<std::size_t>(-1);
  std::size_t winner = kNoWinner;
  if (schedule == Schedule::kDeterministic) {
    while (winner == kNoWinner) {
      std::size_t next = kNoWinner;
      for (std::size_t i = 0; i < walkers.size(); ++i) {
        if (walkers[i].finished()) continue;
        if (next == kNoWinner ||
            walkers[i].weighted_cost() < walkers[next].weighted_cost()) {
          next = i;
        }
      }
      if (next == kNoWinner) break;
      if (walkers[next].step() && walkers[next].outcome().found()) {
        winner = next;
      }
    }
  } else {
    std::atomic<bool> stop{false};
    std::atomic<std::size_t> first{kNoWinner};
    std::vector<std::thread> pool;
    pool.reserve(walkers.size());
    for (std::size_t i = 0; i < walkers.size(); ++i) {
      pool.emplace_back([&, i] {
        BrentWalker& w = walkers[i];
        while (!stop.load(std::memory_order_acquire)) {
          if (!w.step()) continue;
          if (w.outcome().found()) {
            std::size_t expected = kNoWinner;
            first.compare_exchange_strong(expected, i,
                                          std::memory_order_acq_rel);
            stop.store(true, std::memory_order_release);
          }
          break;
        }
      });
    }
    for (auto& t : pool) t.join();
    winner = first.load();
  }

  FactorOutcome out;
  for (const BrentWalker& w : walkers) {
    out.machines.push_back(w.outcome().machines.front());
  }
  if (winner != kNoWinner) {
    const FactorOutcome won = walkers[winner].outcome();
    out.status = FactorStatus::kFound;
    out.factor = won.factor;
    out.iterations = won.iterations;
    out.weighted_cost = won.weighted_cost;
    out.restarts = won.restarts;
    out.winner_index = winner;
  } else {
    out.status = FactorStatus::kExhausted;
    for (const auto& m : out.machines) {
      out.iterations += m.iterations;
      out.weighted_cost += m.weighted_cost;
      out.restarts += m.restarts;
    }
  }
  return out;
}

std::uint64_t heuristic_rho_length(std::uint64_t p, std::uint64_t k,
                                   std::uint64_t c, std::uint64_t x0) {
  if (p < 3 || p >= (std::uint64_t{1} << 31) || !numtheory::is_prime(p)) {
    throw DomainError("p must be an odd prime below 2^31");
  }
  if (k == 0) throw DomainError("exponent k must be >= 1");
  if (c >= p || x0 >= p) throw DomainError("c and x0 must be reduced mod p");
  std::vector<bool> seen(p, false);
  std::uint64_t count = 0;
  std::uint64_t x = x0;
  while (!seen[x]) {
    seen[x] = true;
    ++count;
    x = (numtheory::pow_mod(x, 2 * k, p) + c) % p;
  }
  return count;
}

std::vector<double> heuristic_samples(std::uint64_t p, std::uint64_t k,
                                      std::uint64_t trials,
                                      std::uint64_t seed) {
  if (p < 3 || p >= (std::uint64_t{1} << 31) || !numtheory::is_prime(p)) {
    throw DomainError("p must be an odd prime below 2^31, got " +
                      std::to_string(p));
  }
  Rng rng = make_stream(seed, 0);
  std::vector<double> out;
  out.reserve(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const std::uint64_t c = draw_c(p, rng);
    const std::uint64_t x0 = uniform_below(rng, p);
    out.push_back(static_cast<double>(heuristic_rho_length(p, k, c, x0)));
  }
  return out;
}

HeuristicReport heuristic_check(std::uint64_t p, std::uint64_t k,
                                std::uint64_t trials, std::uint64_t seed) {
  if (trials < 100) throw DomainError("at least 100 trials are required");
  const std::vector<double> samples = heuristic_samples(p, k, trials, seed);
  stats::RunningStats s;
  for (const double v : samples) s.add(v);

  HeuristicReport r;
  r.p = p;
  r.k = k;
  r.d = std::gcd(p - 1, 2 * k);
  r.trials = trials;
  r.empirical_mean = s.mean();
  const randmap::RhoModel model = randmap::RhoModel::from_nd(p - 1, r.d);
  r.model_mean = randmap::exact_mean(model);
  r.ratio = r.empirical_mean / r.model_mean;
  r.half_width_95 = s.half_width_95() / r.model_mean;

  const std::vector<double> reference = randmap::sample_rho_lengths(
      p - 1, r.d, trials, stream_seed(seed, 1), randmap::SampleMode::kDirect);
  const stats::KsResult ks = stats::ks_two_sample(samples, reference);
  r.ks_statistic = ks.statistic;
  r.ks_p_value = ks.p_value;
  return r;
}

}  // namespace rholab::rhofactor
