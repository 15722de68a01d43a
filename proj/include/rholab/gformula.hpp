#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rholab::gformula {

// One machine of the parallel rho method: map exponent 2k and the cost of
// one iteration, lambda = log2(2k) squaring/multiply steps.
struct MachineSpec {
  std::uint64_t k = 1;
  double lambda = 1.0;

  // Throws DomainError for k == 0.
  static MachineSpec from_k(std::uint64_t k);
};

// A G evaluation request. ell = lcm{2k_i}.
struct GQuery {
  std::vector<MachineSpec> machines;
  std::uint64_t ell = 2;

  // Throws DomainError on an empty list or a zero k, CapacityError when ell
  // overflows 2^62.
  static GQuery from_ks(std::span<const std::uint64_t> ks);
};

enum class GMethod { kUnits, kDivisors };

struct GTerm {
  std::uint64_t residue_class;  // unit d (units path) or divisor g
  std::uint64_t weight;         // 1, or psi(ell, g)
  double term;                  // inner sum raised to -1/2
};

struct GResult {
  double value = 0.0;
  std::uint64_t ell = 0;
  std::vector<GTerm> breakdown;
  GMethod method = GMethod::kDivisors;
};

// Largest ell accepted by the unit enumeration.
inline constexpr std::uint64_t kUnitEnumerationBound = std::uint64_t{1} << 32;

// Averages the inner term over every unit d mod ell. Throws CapacityError
// for ell > 2^32. With keep_breakdown == false the per-unit list is left
// empty, which is what large sweeps want.
GResult g_value_units(const GQuery& q, bool keep_breakdown = true);

// Same quantity grouped by g = gcd(d - 1, ell) and weighted by psi(ell, g).
// Classes with psi(ell, g) == 0 (all odd g among them) are never evaluated.
GResult g_value_divisors(const GQuery& q);

double g_value(std::span<const std::uint64_t> ks);

struct GTableRow {
  std::vector<std::uint64_t> ks;
  double value;
};

// M == 1: G(k) for k = 1..k_max. M == 2: the triangle k1 <= k2 <= k_max in
// row-major order. When relative, every value is divided by G(1, ..., 1).
// Cells are computed independently; the row order does not depend on
// `threads`.
std::vector<GTableRow> g_table(unsigned m, std::uint64_t k_max, bool relative,
                               unsigned threads = 1);

struct GSearchResult {
  std::vector<std::uint64_t> argmin;
  double min_value = 0.0;
  // Smallest value attained by any other tuple; +inf when only one exists.
  double runner_up = 0.0;
  bool unique = true;
  std::uint64_t tuples_evaluated = 0;
};

// Minimizes G over non-decreasing tuples with entries in [1, k_max]; ties go
// to the lexicographically smallest tuple.
GSearchResult g_search(unsigned m, std::uint64_t k_max, unsigned threads = 1);

struct GVerifyReport {
  bool all_pass = true;
  std::uint64_t min_k = 0;
  double min_value = 0.0;
  std::vector<std::uint64_t> failures;
};

// Checks G(k) > 1 for 2 <= k <= k_max using the divisor path.
GVerifyReport verify_g_gt_one(std::uint64_t k_max, unsigned threads = 1);

// log2(2k) / (2 e^{3/2} log log k); requires at least three distinct prime
// factors in k, otherwise DomainError.
double g_lower_bound(std::uint64_t k);

}  // namespace rholab::gformula
