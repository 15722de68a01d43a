#pragma once

#include <cstdint>
#include <vector>

namespace rholab::numtheory {

inline constexpr std::uint64_t kMaxValue = std::uint64_t{1} << 62;

struct PrimePower {
  std::uint64_t prime;
  unsigned exponent;

  bool operator==(const PrimePower&) const = default;
};

// Prime-power decomposition of `value`. Primes are strictly increasing and
// every exponent is at least one; value 1 has no factors.
struct FactorizationMap {
  std::uint64_t value = 1;
  std::vector<PrimePower> factors;

  // Number of distinct prime factors.
  std::size_t omega() const { return factors.size(); }
};

// gcd(0, m) == m. Throws DomainError when both arguments are zero.
std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

// Throws CapacityError when the result does not fit below 2^62.
std::uint64_t lcm(std::uint64_t a, std::uint64_t b);

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t n);

// Trial division up to 2^21, then Pollard-Brent splitting of the cofactor.
// Throws DomainError for n == 0 or n > 2^62.
FactorizationMap factorize(std::uint64_t n);

std::uint64_t euler_phi(const FactorizationMap& f);

// All positive divisors, ascending.
std::vector<std::uint64_t> divisors(const FactorizationMap& f);

// Number of units x mod p^e with gcd(x - 1, p^e) == g, for g | p^e.
std::uint64_t psi_prime_power(std::uint64_t p, unsigned e, std::uint64_t g);

// Number of units x mod n with gcd(x - 1, n) == g, evaluated prime power by
// prime power. psi(1, 1) == 1.
std::uint64_t psi(const FactorizationMap& n, std::uint64_t g);
std::uint64_t psi(std::uint64_t n, std::uint64_t g);

}  // namespace rholab::numtheory
