// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and runtime
// budgets are fixed here on purpose.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "reference_g.hpp"
#include "rholab/gformula.hpp"
#include "rholab/numtheory.hpp"
#include "rholab/randmap.hpp"
#include "rholab/rhofactor.hpp"
#include "rholab/rng.hpp"
#include "rholab/stats.hpp"

namespace {

using namespace rholab;

struct Verdict {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Verdict()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

unsigned worker_threads() {
  return std::max(1u, std::thread::hardware_concurrency());
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

Verdict single_machine_table() {
  const auto rows = gformula::g_table(1, 64, false);
  double worst = 0.0;
  for (const auto& [k, g] : testdata::kSingleMachineG) {
    worst = std::max(worst, rel_err(rows.at(k - 1).value, g));
  }
  return {rows.size() == 64 && worst <= 1e-9,
          fmt("64 values, max relative error %.3g (limit 1e-9)", worst)};
}

Verdict pair_table() {
  const auto rows = gformula::g_table(2, 14, true);
  int matched = 0;
  std::string first_miss;
  for (const auto& cell : testdata::kPairRelativeG) {
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) {
      return r.ks == std::vector<std::uint64_t>{cell.k1, cell.k2};
    });
    if (it == rows.end()) continue;
    const std::string rounded =
        fmt("%.2f", std::floor(it->value * 100.0 + 0.5) / 100.0);
    if (rounded == cell.printed) {
      ++matched;
    } else if (first_miss.empty()) {
      first_miss = fmt(" first mismatch (%llu,%llu): %s vs %s",
                       static_cast<unsigned long long>(cell.k1),
                       static_cast<unsigned long long>(cell.k2), rounded.c_str(),
                       cell.printed);
    }
  }
  return {matched == 105, fmt("%d/105 cells match", matched) + first_miss};
}

Verdict path_equivalence() {
  std::vector<std::vector<std::uint64_t>> tuples;
  for (std::uint64_t a = 1; a <= 64; ++a) {
    tuples.push_back({a});
    for (std::uint64_t b = a; b <= 64; ++b) tuples.push_back({a, b});
  }
  Rng rng = make_stream(2024, 0);
  for (const unsigned m : {3u, 4u}) {
    int drawn = 0;
    while (drawn < 500) {
      std::vector<std::uint64_t> ks(m);
      std::uint64_t ell = 1;
      for (auto& k : ks) {
        k = 1 + uniform_below(rng, 64);
        ell = std::lcm(ell, 2 * k);
      }
      if (ell > (1u << 17)) continue;
      tuples.push_back(ks);
      ++drawn;
    }
  }
  double worst = 0.0;
  for (const auto& ks : tuples) {
    const auto q = gformula::GQuery::from_ks(ks);
    worst = std::max(worst, rel_err(gformula::g_value_units(q, false).value,
                                    gformula::g_value_divisors(q).value));
  }
  return {worst <= 1e-12,
          fmt("%zu tuples (M <= 4, k <= 64), max relative gap %.3g (limit 1e-12)",
              tuples.size(), worst)};
}

Verdict g_above_one() {
  const auto r = gformula::verify_g_gt_one(100000, worker_threads());
  return {r.all_pass && r.failures.empty(),
          fmt("k in [2, 1e5]: %zu failures, min G = %.17g at k = %llu",
              r.failures.size(), r.min_value,
              static_cast<unsigned long long>(r.min_k))};
}

Verdict all_ones_optimal() {
  Verdict v;
  for (const auto& [m, k_max] : {std::pair<unsigned, std::uint64_t>{2, 50}, {3, 20}}) {
    const auto s = gformula::g_search(m, k_max, worker_threads());
    const bool ok = s.argmin == std::vector<std::uint64_t>(m, 1) && s.unique;
    v.pass = v.pass && ok;
    v.detail += fmt("M=%u kmax=%llu: min %.17g, runner-up %.17g, %s; ", m,
                    static_cast<unsigned long long>(k_max), s.min_value,
                    s.runner_up, ok ? "unique all-ones" : "NOT all-ones");
  }
  return v;
}

struct Config {
  std::vector<std::uint64_t> ds;
  std::vector<double> lambdas;
};

Verdict min_expectation_monte_carlo() {
  const std::vector<Config> configs = {
      {{2}, {1.0}},
      {{2, 4}, {1.0, 2.0}},
      {{2, 2, 6}, {1.0, 1.0, std::log2(6.0)}}};
  Verdict v;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& c = configs[i];
    const double rhs = randmap::theorem1_rhs(10000, c.ds, c.lambdas);
    const auto batch = randmap::estimate_min_expectation(
        10000, c.ds, c.lambdas, 20000, 600 + i, randmap::SampleMode::kDirect);
    const double dev = std::abs(batch.mean / rhs - 1.0);
    const double dev_small =
        std::abs(randmap::exact_min_mean(1000, c.ds, c.lambdas) /
                     randmap::theorem1_rhs(1000, c.ds, c.lambdas) - 1.0);
    const double dev_large =
        std::abs(randmap::exact_min_mean(100000, c.ds, c.lambdas) /
                     randmap::theorem1_rhs(100000, c.ds, c.lambdas) - 1.0);
    const bool ok = dev <= 0.05 && dev_large < dev_small;
    v.pass = v.pass && ok;
    v.detail += fmt("cfg%zu: mean %.2f vs %.2f (%.2f%%), exact dev %.3g -> %.3g; ",
                    i + 1, batch.mean, rhs, 100.0 * dev, dev_small, dev_large);
  }
  return v;
}

Verdict pmf_consistency() {
  Verdict v;
  double worst = 0.0;
  for (const double q : {1.0, 4.0, 10.0, 1e2, 1e3, 1e4}) {
    worst = std::max(worst,
                     std::abs(randmap::pmf_total(randmap::RhoModel::from_q(q)) - 1.0));
  }
  const auto model = randmap::RhoModel::from_q(1e4);
  const double exact = randmap::exact_mean(model);
  const double asymptotic = std::sqrt(std::numbers::pi * 1e4 / 2.0);
  const std::uint64_t d2[] = {2};
  const double l1[] = {1.0};
  const auto batch = randmap::estimate_min_expectation(
      10000, d2, l1, 10000, 700, randmap::SampleMode::kDirect);
  v.pass = worst <= 1e-12 && rel_err(exact, asymptotic) <= 0.01 &&
           std::abs(batch.mean - exact) <= batch.half_width_95;
  v.detail = fmt("max |sum - 1| %.3g; exact mean %.4f vs %.4f (%.3f%%); "
                 "sampled %.3f +- %.3f",
                 worst, exact, asymptotic, 100.0 * rel_err(exact, asymptotic),
                 batch.mean, batch.half_width_95);
  return v;
}

Verdict sampler_ground_truth() {
  Verdict v;
  for (const auto& [n, d] : {std::pair<std::uint64_t, std::uint64_t>{100, 2},
                             {120, 3}, {100, 4}}) {
    const auto map = randmap::sample_rho_lengths(n, d, 10000, 800 + d,
                                                 randmap::SampleMode::kFullMap);
    const auto direct = randmap::sample_rho_lengths(n, d, 10000, 900 + d,
                                                    randmap::SampleMode::kDirect);
    const auto ks = stats::ks_two_sample(map, direct, 0.01);
    v.pass = v.pass && !ks.reject;
    v.detail += fmt("KS(%llu,%llu) D=%.4f crit=%.4f p=%.3g; ",
                    static_cast<unsigned long long>(n),
                    static_cast<unsigned long long>(d), ks.statistic,
                    ks.critical_value, ks.p_value);
  }
  std::map<std::vector<std::uint32_t>, std::uint64_t> counts;
  Rng rng = make_stream(1000, 0);
  for (int i = 0; i < 360000; ++i) ++counts[randmap::sample_f_nd(4, 2, rng).images];
  std::vector<std::uint64_t> observed;
  for (const auto& [f, c] : counts) observed.push_back(c);
  const std::vector<double> expected(observed.size(), 1.0 / 36.0);
  const auto chi = stats::chi_square_gof(observed, expected, 0.01);
  v.pass = v.pass && counts.size() == 36 && !chi.reject;
  v.detail += fmt("chi2(F_4^2) %zu functions, stat=%.2f crit=%.2f", counts.size(),
                  chi.statistic, chi.critical_value);
  return v;
}

Verdict speedup_law() {
  auto mean = [](const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  };
  const double m1 = mean(rhofactor::heuristic_samples(10009, 1, 1000, 1100));
  const double m3 = mean(rhofactor::heuristic_samples(10009, 3, 1000, 1101));
  const double target = 1.0 / std::sqrt(5.0);
  const double ratio = m3 / m1;
  return {rel_err(ratio, target) <= 0.15,
          fmt("mean k=3 %.2f / k=1 %.2f = %.4f vs %.4f (%.1f%%, limit 15%%)", m3, m1,
              ratio, target, 100.0 * rel_err(ratio, target))};
}

Verdict heuristic_validation() {
  const auto a = rhofactor::heuristic_check(10007, 1, 2000, 1200);
  const auto b = rhofactor::heuristic_check(10009, 3, 2000, 1201);
  return {a.ratio >= 0.95 && a.ratio <= 1.05 && b.ratio >= 0.93 && b.ratio <= 1.07,
          fmt("(10007,1) ratio %.4f in [0.95,1.05]; (10009,3) ratio %.4f in "
              "[0.93,1.07]",
              a.ratio, b.ratio)};
}

std::uint64_t random_prime(Rng& rng, unsigned bits) {
  const std::uint64_t lo = std::uint64_t{1} << (bits - 1);
  for (;;) {
    const std::uint64_t candidate = (lo + uniform_below(rng, lo)) | 1;
    if (numtheory::is_prime(candidate)) return candidate;
  }
}

Verdict factorizer_correctness() {
  Rng rng = make_stream(1300, 0);
  int factored = 0, agreed = 0;
  for (int i = 0; i < 500; ++i) {
    std::uint64_t p, q;
    do {
      p = random_prime(rng, 20 + static_cast<unsigned>(uniform_below(rng, 12)));
      q = random_prime(rng, 20 + static_cast<unsigned>(uniform_below(rng, 12)));
    } while (p == q);
    const std::uint64_t n = p * q;
    const std::uint64_t k = 1 + uniform_below(rng, 3);
    const auto task = rhofactor::draw_task(n, k, rng, 100'000'000, 128);
    auto single = task;
    single.batch_size = 1;
    Rng ra = rng, rb = rng;
    const auto batched = rhofactor::pollard_rho_brent(task, ra);
    const auto stepwise = rhofactor::pollard_rho_brent(single, rb);
    auto good = [&](const rhofactor::FactorOutcome& o) {
      return o.found() && o.factor > 1 && o.factor < n && n % o.factor == 0;
    };
    factored += good(batched) && good(stepwise);
    agreed += batched.factor == stepwise.factor &&
              batched.iterations == stepwise.iterations;
  }
  return {factored == 500 && agreed == 500,
          fmt("%d/500 factored on both paths, %d/500 identical factor and "
              "iteration count",
              factored, agreed)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "G(k) table for M = 1", 1, single_machine_table},
      {2, "relative G(k1, k2) table", 5, pair_table},
      {3, "units and divisor paths agree", 30, path_equivalence},
      {4, "G(k) > 1 for 2 <= k <= 1e5", 300, g_above_one},
      {5, "all-ones tuple is the unique minimum", 600, all_ones_optimal},
      {6, "Monte-Carlo minimum vs asymptotic", 120, min_expectation_monte_carlo},
      {7, "collision pmf consistency", 30, pmf_consistency},
      {8, "full-map vs direct sampler", 60, sampler_ground_truth},
      {9, "speedup law sqrt(d - 1)", 60, speedup_law},
      {10, "random-map heuristic", 60, heuristic_validation},
      {11, "factorizer correctness", 120, factorizer_correctness},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v = c.run();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_seconds) {
      v.pass = false;
      v.detail += fmt(" [over budget %.0f s]", c.budget_seconds);
    }
    failed += !v.pass;
    std::printf("[%s] %2d %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", c.id,
                c.title, v.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
