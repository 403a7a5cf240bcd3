#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "tracecheck/exactnum.hpp"

namespace tc {

inline constexpr long kInfiniteValuation = std::numeric_limits<long>::max();

bool is_prime(std::uint64_t n);

// v_p(x); kInfiniteValuation for x = 0.
long vp(const BigInt& x, Prime p);
long vp(const Rational& x, Prime p);

// x * p^{-v_p(x)}, a p-adic unit. x must be nonzero.
Rational unit_part(const Rational& x, Prime p);
// Residue of a p-adic unit rational modulo p^k.
std::uint64_t unit_residue(const Rational& u, Prime p, int k);
// Legendre symbol of a unit residue r mod odd p.
int legendre(std::uint64_t r, Prime p);

// Exponent E with |y|'_p = p^{-E}. Always even.
long modified_norm_exponent(Prime p, const Rational& y);
HalfPowRational modified_norm(Prime p, const Rational& y);

// The class eps in {-1, 0, 1} with y in Y_eps.
int omega(Prime p, const Rational& y);
int omega_inf(const Rational& x);

// p^k = |T^2 - 4N|'^{-1/2}.
long k_of(Prime p, const Rational& T, const Rational& N);

class PlaceSet {
 public:
  // Validates primality, 2 in S; sorts and removes nothing (duplicates rejected).
  explicit PlaceSet(std::vector<Prime> finite_primes);
  const std::vector<Prime>& primes() const { return primes_; }
  bool contains(Prime p) const;
  bool coprime(std::uint64_t n) const;
  // prod (1 - 1/q)
  Rational euler_factor() const;

 private:
  std::vector<Prime> primes_;
};

// Returns (q-part, away part) with x = q-part * away part.
std::pair<Rational, Rational> q_decompose(const Rational& x, const PlaceSet& S);

struct SplitElement {
  Rational a;
  Rational b;
  SplitElement(Rational a_, Rational b_);
  Rational trace() const { return a + b; }
  Rational det() const { return a * b; }
  bool regular() const { return a != b; }
};

}  // namespace tc
