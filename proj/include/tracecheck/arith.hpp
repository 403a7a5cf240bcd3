#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "tracecheck/exactnum.hpp"
#include "tracecheck/padic.hpp"

namespace tc {

// Tables indexed by n in [1, X); index 0 unused.
struct MultTables {
  std::uint64_t X = 0;
  std::vector<std::uint32_t> d;
  std::vector<std::uint64_t> phi;
  std::vector<std::int8_t> mu;
  // Lambda(n) = log lam_p[n] when lam_p[n] != 0; n = lam_p^lam_e.
  std::vector<std::uint32_t> lam_p;
  std::vector<std::uint8_t> lam_e;
  std::vector<std::uint32_t> spf;  // smallest prime factor
  std::vector<std::uint32_t> primes;

  LogNumber lambda(std::uint64_t n) const;
};

inline constexpr std::uint64_t kSieveMemoryLimit = 200'000'000;

MultTables sieve(std::uint64_t X);

// Primes below X.
std::vector<std::uint32_t> primes_below(std::uint64_t X);

struct InvSum {
  Rational sum;
  double main;
};
InvSum sum_inv_coprime(std::uint64_t X, const PlaceSet& S);

// gamma + sum_q log q / (q - 1), enclosed to `precision` decimal digits.
Interval gamma_S(const PlaceSet& S, int precision);
double gamma_S(const PlaceSet& S);

class DirichletCharacter {
 public:
  static DirichletCharacter principal(std::uint64_t modulus);
  // Every character of (Z/mZ)^*, principal first.
  static std::vector<DirichletCharacter> all(std::uint64_t modulus);

  std::uint64_t modulus() const { return modulus_; }
  // Values are order()-th roots of unity.
  unsigned order() const { return order_; }
  std::uint64_t conductor() const { return conductor_; }
  bool is_principal() const { return order_ == 1; }

  // -1 when chi(n) = 0, else k with chi(n) = exp(2 pi i k / order).
  int exponent(std::uint64_t n) const { return exps_[n % modulus_]; }
  std::complex<double> value(std::uint64_t n) const;
  // Exact Gaussian-integer value; only for order dividing 4.
  std::pair<int, int> gaussian(std::uint64_t n) const;
  bool exact() const { return 4 % order_ == 0; }

  // True iff chi(n) = 0 exactly when n shares a prime with S.
  bool matches(const PlaceSet& S) const;

  DirichletCharacter(std::uint64_t modulus, unsigned order, std::vector<int> exps);

 private:
  std::uint64_t modulus_;
  unsigned order_;
  std::vector<int> exps_;
  std::uint64_t conductor_ = 1;
};

struct DivisorSum {
  bool exact = false;
  std::int64_t re = 0;  // exact Gaussian-integer sum when `exact`
  std::int64_t im = 0;
  std::complex<double> value;
  double main = 0;
};
DivisorSum sum_divisor_coprime(std::uint64_t X, const PlaceSet& S, const DirichletCharacter& chi,
                               unsigned threads = 1);

LogNumber prime_log_sum(std::uint64_t X, const PlaceSet& S);

// sum_{p not in S} log p / (p^2 - 1), through -zeta'(2)/zeta(2).
double prime_quadratic_constant(const PlaceSet& S, double tol);

struct TruncatedSum {
  double partial;
  double tail_bound;
};
// Direct summation over p < P with the rigorous tail bound (4/3)(log P + 1)/P.
TruncatedSum prime_quadratic_direct(const PlaceSet& S, std::uint64_t P);

// zeta(s, a) - 1/(s - 1), finite at s = 1 where it equals -digamma(a).
std::complex<double> hurwitz_zeta_regular(std::complex<double> s, double a, double tol);
std::complex<double> l_value(const DirichletCharacter& chi, std::complex<double> s, double tol);
// zeta'(s) / zeta(s) for real s > 1.
long double zeta_log_derivative(long double s);

std::complex<double> convolution_sum(std::uint64_t X, std::complex<double> s,
                                     const DirichletCharacter& chi1, const DirichletCharacter& chi2,
                                     const PlaceSet& S, unsigned threads = 1);
std::complex<double> convolution_main_term(double X, std::complex<double> s,
                                           const DirichletCharacter& chi1,
                                           const DirichletCharacter& chi2, const PlaceSet& S);

}  // namespace tc
