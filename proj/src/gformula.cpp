#include "rholab/gformula.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rholab/errors.hpp"
#include "rholab/numtheory.hpp"
#include "rholab/parallel.hpp"

namespace rholab::gformula {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// (sum_i (gcd(r, 2k_i) - 1) / lambda_i^2)^(-1/2), with gcd(0, m) = m.
double class_term(const GQuery& q, std::uint64_t r) {
  double inner = 0.0;
  for (const MachineSpec& m : q.machines) {
    const double g = static_cast<double>(std::gcd(r, 2 * m.k));
    inner += (g - 1.0) / (m.lambda * m.lambda);
  }
  return std::pow(inner, -0.5);
}

// Visits non-decreasing tuples over [1, k_max]^m in lexicographic order.
template <typename Fn>
void for_each_sorted_tuple(unsigned m, std::uint64_t k_max, Fn&& fn) {
  std::vector<std::uint64_t> t(m, 1);
  while (true) {
    fn(t);
    int pos = static_cast<int>(m) - 1;
    while (pos >= 0 && t[pos] == k_max) --pos;
    if (pos < 0) return;
    ++t[pos];
    for (unsigned j = pos + 1; j < m; ++j) t[j] = t[pos];
  }
}

}  // namespace

MachineSpec MachineSpec::from_k(std::uint64_t k) {
  if (k == 0) throw DomainError("machine exponent k must be >= 1");
  if (k > numtheory::kMaxValue / 2) throw CapacityError("k too large");
  return MachineSpec{k, std::log2(2.0 * static_cast<double>(k))};
}

GQuery GQuery::from_ks(std::span<const std::uint64_t> ks) {
  if (ks.empty()) throw DomainError("G needs at least one machine");
  GQuery q;
  q.ell = 1;
  q.machines.reserve(ks.size());
  for (const std::uint64_t k : ks) {
    q.machines.push_back(MachineSpec::from_k(k));
    q.ell = numtheory::lcm(q.ell, 2 * k);
  }
  return q;
}

GResult g_value_units(const GQuery& q, bool keep_breakdown) {
  if (q.ell > kUnitEnumerationBound) {
    throw CapacityError("unit enumeration: ell = " + std::to_string(q.ell) +
                        " exceeds 2^32");
  }
  GResult result;
  result.ell = q.ell;
  result.method = GMethod::kUnits;
  CompensatedSum sum;
  std::uint64_t units = 0;
  // ell is even, so every unit is odd.
  for (std::uint64_t d = 1; d < q.ell; d += 2) {
    if (std::gcd(d, q.ell) != 1) continue;
    const double term = class_term(q, d - 1);
    sum.add(term);
    ++units;
    if (keep_breakdown) result.breakdown.push_back({d, 1, term});
  }
  result.value = sum.value() / static_cast<double>(units);
  return result;
}

GResult g_value_divisors(const GQuery& q) {
  const numtheory::FactorizationMap ell = numtheory::factorize(q.ell);
  GResult result;
  result.ell = q.ell;
  result.method = GMethod::kDivisors;
  CompensatedSum sum;
  for (const std::uint64_t g : numtheory::divisors(ell)) {
    const std::uint64_t weight = numtheory::psi(ell, g);
    if (weight == 0) continue;
    const double term = class_term(q, g);
    sum.add(static_cast<double>(weight) * term);
    result.breakdown.push_back({g, weight, term});
  }
  result.value = sum.value() / static_cast<double>(numtheory::euler_phi(ell));
  return result;
}

double g_value(std::span<const std::uint64_t> ks) {
  return g_value_divisors(GQuery::from_ks(ks)).value;
}

std::vector<GTableRow> g_table(unsigned m, std::uint64_t k_max, bool relative,
                               unsigned threads) {
  if (m != 1 && m != 2) throw DomainError("g_table supports M = 1 or M = 2");
  if (k_max == 0) throw DomainError("g_table: k_max must be >= 1");
  std::vector<GTableRow> rows;
  for_each_sorted_tuple(m, k_max, [&](const std::vector<std::uint64_t>& t) {
    rows.push_back({t, 0.0});
  });
  const double base =
      relative ? g_value(std::vector<std::uint64_t>(m, 1)) : 1.0;
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    rows[i].value = g_value(rows[i].ks) / base;
  });
  return rows;
}

GSearchResult g_search(unsigned m, std::uint64_t k_max, unsigned threads) {
  if (m == 0) throw DomainError("g_search: M must be >= 1");
  if (k_max == 0) throw DomainError("g_search: k_max must be >= 1");
  std::vector<std::vector<std::uint64_t>> tuples;
  for_each_sorted_tuple(m, k_max, [&](const std::vector<std::uint64_t>& t) {
    tuples.push_back(t);
  });
  std::vector<double> values(tuples.size());
  parallel_for(tuples.size(), threads,
               [&](std::size_t i) { values[i] = g_value(tuples[i]); });

  GSearchResult result;
  result.tuples_evaluated = tuples.size();
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  result.argmin = tuples[best];
  result.min_value = values[best];
  result.runner_up = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != best && values[i] < result.runner_up) result.runner_up = values[i];
  }
  result.unique = result.runner_up > result.min_value;
  return result;
}

GVerifyReport verify_g_gt_one(std::uint64_t k_max, unsigned threads) {
  if (k_max < 2) throw DomainError("verify_g_gt_one: k_max must be >= 2");
  const std::size_t count = k_max - 1;
  std::vector<double> values(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const std::uint64_t k = i + 2;
    values[i] = g_value(std::span<const std::uint64_t>(&k, 1));
  });
  GVerifyReport report;
  report.min_k = 2;
  report.min_value = values[0];
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t k = i + 2;
    if (!(values[i] > 1.0)) {
      report.all_pass = false;
      report.failures.push_back(k);
    }
    if (values[i] < report.min_value) {
      report.min_value = values[i];
      report.min_k = k;
    }
  }
  return report;
}

double g_lower_bound(std::uint64_t k) {
  if (k < 2) throw DomainError("g_lower_bound: k must be >= 2");
  if (numtheory::factorize(k).omega() < 3) {
    throw DomainError("g_lower_bound: k = " + std::to_string(k) +
                      " has fewer than three distinct prime factors");
  }
  const double kd = static_cast<double>(k);
  return std::log2(2.0 * kd) /
         (2.0 * std::exp(1.5) * std::log(std::log(kd)));
}

}  // namespace rholab::gformula
