#include "rholab/numtheory.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <string>

#include "rholab/errors.hpp"

namespace rholab::numtheory {

namespace {

constexpr std::uint64_t kTrialDivisionLimit = std::uint64_t{1} << 21;

std::uint64_t ipow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

// Finds a nontrivial divisor of an odd composite n with Brent's variant of
// Pollard rho on x^2 + c.
std::uint64_t split_composite(std::uint64_t n) {
  constexpr std::uint64_t kBatch = 128;
  for (std::uint64_t c = 1;; ++c) {
    auto f = [&](std::uint64_t x) { return (mul_mod(x, x, n) + c) % n; };
    std::uint64_t y = 2, x = 2, ys = 2, q = 1, g = 1;
    for (std::uint64_t r = 1; g == 1; r <<= 1) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      for (std::uint64_t done = 0; done < r && g == 1; done += kBatch) {
        ys = y;
        const std::uint64_t steps = std::min(kBatch, r - done);
        for (std::uint64_t i = 0; i < steps; ++i) {
          y = f(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
      }
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void collect_primes(std::uint64_t n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  const std::uint64_t d = split_composite(n);
  collect_primes(d, out);
  collect_primes(n / d, out);
}

}  // namespace

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  if (a == 0 && b == 0) throw DomainError("gcd(0, 0) is undefined");
  return std::gcd(a, b);
}

std::uint64_t lcm(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  const std::uint64_t step = a / std::gcd(a, b);
  if (step > kMaxValue / b) {
    throw CapacityError("lcm(" + std::to_string(a) + ", " + std::to_string(b) +
                        ") exceeds 2^62");
  }
  return step * b;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::array<std::uint64_t, 12> kBases = {
      2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (const std::uint64_t p : kBases) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (const std::uint64_t a : kBases) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

FactorizationMap factorize(std::uint64_t n) {
  if (n == 0 || n > kMaxValue) {
    throw DomainError("factorize: argument " + std::to_string(n) +
                      " outside [1, 2^62]");
  }
  FactorizationMap result;
  result.value = n;
  std::vector<std::uint64_t> primes;
  std::uint64_t rest = n;
  for (std::uint64_t p = 2; p <= kTrialDivisionLimit && p * p <= rest;
       p += (p == 2 ? 1 : 2)) {
    while (rest % p == 0) {
      primes.push_back(p);
      rest /= p;
    }
  }
  if (rest > 1) {
    if (rest <= kTrialDivisionLimit * kTrialDivisionLimit) {
      primes.push_back(rest);
    } else {
      collect_primes(rest, primes);
    }
  }
  std::sort(primes.begin(), primes.end());
  for (const std::uint64_t p : primes) {
    if (!result.factors.empty() && result.factors.back().prime == p) {
      ++result.factors.back().exponent;
    } else {
      result.factors.push_back({p, 1});
    }
  }
  return result;
}

std::uint64_t euler_phi(const FactorizationMap& f) {
  std::uint64_t phi = 1;
  for (const auto& [p, e] : f.factors) phi *= (p - 1) * ipow(p, e - 1);
  return phi;
}

std::vector<std::uint64_t> divisors(const FactorizationMap& f) {
  std::vector<std::uint64_t> out = {1};
  for (const auto& [p, e] : f.factors) {
    const std::size_t base = out.size();
    std::uint64_t pk = 1;
    for (unsigned k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t psi_prime_power(std::uint64_t p, unsigned e, std::uint64_t g) {
  if (e == 0) throw DomainError("psi_prime_power: exponent must be >= 1");
  const std::uint64_t pe = ipow(p, e);
  if (g == 0 || pe % g != 0) {
    throw DomainError("psi_prime_power: " + std::to_string(g) +
                      " does not divide " + std::to_string(pe));
  }
  const std::uint64_t p_em1 = pe / p;
  if (g == 1) return (pe - p_em1) - p_em1;
  // phi(p^e / g); p^e / g is a power of p.
  const std::uint64_t rest = pe / g;
  return rest == 1 ? 1 : rest - rest / p;
}

std::uint64_t psi(const FactorizationMap& n, std::uint64_t g) {
  if (g == 0 || n.value % g != 0) {
    throw DomainError("psi: " + std::to_string(g) + " does not divide " +
                      std::to_string(n.value));
  }
  std::uint64_t result = 1;
  for (const auto& [p, e] : n.factors) {
    const std::uint64_t pe = ipow(p, e);
    result *= psi_prime_power(p, e, std::gcd(pe, g));
    if (result == 0) break;
  }
  return result;
}

std::uint64_t psi(std::uint64_t n, std::uint64_t g) {
  return psi(factorize(n), g);
}

}  // namespace rholab::numtheory
