#include "tracecheck/padic.hpp"

#include <algorithm>

#include "tracecheck/errors.hpp"

namespace tc {

namespace {
using u128 = unsigned __int128;

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = static_cast<std::uint64_t>(static_cast<u128>(r) * b % m);
    b = static_cast<std::uint64_t>(static_cast<u128>(b) * b % m);
    e >>= 1;
  }
  return r;
}

void require_prime(Prime p) {
  if (!is_prime(p)) throw ContractError(std::to_string(p) + " is not prime");
}
}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic for 64-bit inputs.
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = static_cast<std::uint64_t>(static_cast<u128>(x) * x % n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

long vp(const BigInt& x, Prime p) {
  if (x == 0) return kInfiniteValuation;
  BigInt y = x < 0 ? BigInt(-x) : x;
  long v = 0;
  const BigInt bp(p);
  while (y % bp == 0) {
    y /= bp;
    ++v;
  }
  return v;
}

long vp(const Rational& x, Prime p) {
  if (x == 0) return kInfiniteValuation;
  return vp(numerator(x), p) - vp(denominator(x), p);
}

Rational unit_part(const Rational& x, Prime p) {
  if (x == 0) throw DomainError("unit part of zero");
  return x * rpow(p, -vp(x, p));
}

std::uint64_t unit_residue(const Rational& u, Prime p, int k) {
  BigInt mod = boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(k));
  BigInt n = numerator(u) % mod;
  if (n < 0) n += mod;
  BigInt d = denominator(u) % mod;
  if (d % p == 0 || n % p == 0) throw DomainError("unit_residue of a non-unit");
  // d^{-1} mod p^k via phi(p^k) - 1 power; moduli here are tiny.
  std::uint64_t m = mod.convert_to<std::uint64_t>();
  std::uint64_t phi = m / p * (p - 1);
  std::uint64_t dinv = powmod(d.convert_to<std::uint64_t>(), phi - 1, m);
  return static_cast<std::uint64_t>(static_cast<u128>(n.convert_to<std::uint64_t>()) * dinv % m);
}

int legendre(std::uint64_t r, Prime p) {
  r %= p;
  if (r == 0) return 0;
  return powmod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

long modified_norm_exponent(Prime p, const Rational& y) {
  require_prime(p);
  if (y == 0) throw DomainError("modified norm of zero");
  long v = vp(y, p);
  long fl = (v >= 0) ? v / 2 : -((-v + 1) / 2);
  if (p != 2) return 2 * fl;
  if (v % 2 != 0) return v - 3;
  return unit_residue(unit_part(y, 2), 2, 2) == 1 ? v : v - 2;
}

HalfPowRational modified_norm(Prime p, const Rational& y) {
  return HalfPowRational::half_power(p, -2 * modified_norm_exponent(p, y));
}

int omega(Prime p, const Rational& y) {
  require_prime(p);
  if (y == 0) throw DomainError("omega of zero");
  long v = vp(y, p);
  if (v % 2 != 0) return 0;
  if (p == 2) {
    std::uint64_t r = unit_residue(unit_part(y, 2), 2, 3);
    if (r == 1) return 1;
    if (r == 5) return -1;
    return 0;
  }
  return legendre(unit_residue(unit_part(y, p), p, 1), p);
}

int omega_inf(const Rational& x) {
  if (x == 0) throw DomainError("omega_inf of zero");
  return x > 0 ? 0 : 1;
}

long k_of(Prime p, const Rational& T, const Rational& N) {
  Rational disc = T * T - 4 * N;
  if (disc == 0) throw DomainError("non-regular element: T^2 = 4N");
  return modified_norm_exponent(p, disc) / 2;
}

PlaceSet::PlaceSet(std::vector<Prime> finite_primes) : primes_(std::move(finite_primes)) {
  std::sort(primes_.begin(), primes_.end());
  if (std::adjacent_find(primes_.begin(), primes_.end()) != primes_.end())
    throw ContractError("duplicate prime in S");
  for (Prime q : primes_) require_prime(q);
  if (!contains(2)) throw ContractError("S must contain 2");
}

bool PlaceSet::contains(Prime p) const {
  return std::binary_search(primes_.begin(), primes_.end(), p);
}

bool PlaceSet::coprime(std::uint64_t n) const {
  for (Prime q : primes_)
    if (n % q == 0) return false;
  return true;
}

Rational PlaceSet::euler_factor() const {
  Rational c(1);
  for (Prime q : primes_) c *= Rational(BigInt(q - 1), BigInt(q));
  return c;
}

std::pair<Rational, Rational> q_decompose(const Rational& x, const PlaceSet& S) {
  if (x == 0) throw DomainError("q_decompose of zero");
  Rational qpart(1);
  for (Prime q : S.primes()) qpart *= rpow(q, vp(x, q));
  return {qpart, x / qpart};
}

SplitElement::SplitElement(Rational a_, Rational b_) : a(std::move(a_)), b(std::move(b_)) {
  if (a == 0 || b == 0) throw DomainError("split element with zero eigenvalue");
}

}  // namespace tc
