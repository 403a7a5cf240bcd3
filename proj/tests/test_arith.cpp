#include <doctest.h>

#include <cmath>
#include <numeric>

#include "tracecheck/arith.hpp"
#include "tracecheck/errors.hpp"

using namespace tc;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEuler = 0.57721566490153286061;

int brute_d(std::uint64_t n) {
  int c = 0;
  for (std::uint64_t k = 1; k <= n; ++k) c += n % k == 0;
  return c;
}

std::uint64_t brute_phi(std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t k = 1; k <= n; ++k) c += std::gcd(k, n) == 1;
  return c;
}

int brute_mu(std::uint64_t n) {
  int s = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      s = -s;
    }
  return n > 1 ? -s : s;
}

}  // namespace

TEST_CASE("sieve tables against brute force") {
  MultTables t = sieve(1500);
  for (std::uint64_t n = 1; n < 1500; ++n) {
    CHECK(t.d[n] == static_cast<std::uint32_t>(brute_d(n)));
    CHECK(t.phi[n] == brute_phi(n));
    CHECK(t.mu[n] == brute_mu(n));
  }
  CHECK(t.lambda(1).is_zero());
  CHECK(t.lambda(6).is_zero());
  CHECK(t.lambda(8) == LogNumber::log(2));
  CHECK(t.lambda(1331) == LogNumber::log(11));
  CHECK_THROWS_AS(t.lambda(1500), ContractError);
  CHECK_THROWS_AS(sieve(1), ContractError);
  CHECK_THROWS_AS(sieve(kSieveMemoryLimit + 1), ResourceError);

  auto ps = primes_below(30);
  CHECK(ps == std::vector<std::uint32_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
  CHECK(primes_below(100000).size() == 9592);
}

TEST_CASE("harmonic sums over S-coprime integers") {
  PlaceSet S({2});
  CHECK(sum_inv_coprime(10, S).sum == rat(1, 1) + rat(1, 3) + rat(1, 5) + rat(1, 7) + rat(1, 9));
  PlaceSet S23({2, 3});
  CHECK(sum_inv_coprime(12, S23).sum == rat(1, 1) + rat(1, 5) + rat(1, 7) + rat(1, 11));

  Interval g = gamma_S(S, 30);
  CHECK(g.contains(kEuler + std::log(2.0)));
  CHECK(g.lo.substr(0, 14) == "1.270362845461");

  const InvSum h = sum_inv_coprime(100000, S);
  CHECK(std::abs(to_double(h.sum) - h.main) <= 10.0 / 100000);
  CHECK(h.main == doctest::Approx(0.5 * (std::log(1e5) + kEuler + std::log(2.0))).epsilon(1e-14));
}

TEST_CASE("Dirichlet characters") {
  auto c4 = DirichletCharacter::all(4);
  REQUIRE(c4.size() == 2);
  CHECK(c4[0].is_principal());
  CHECK(c4[1].order() == 2);
  CHECK(c4[1].value(3) == std::complex<double>(-1, 0));
  CHECK(c4[1].value(5) == std::complex<double>(1, 0));
  CHECK(c4[1].value(2) == std::complex<double>(0, 0));
  CHECK(c4[1].conductor() == 4);

  for (std::uint64_t m : {5, 8, 12, 15, 16, 21}) {
    auto chars = DirichletCharacter::all(m);
    std::uint64_t phi = 0;
    for (std::uint64_t n = 1; n <= m; ++n) phi += std::gcd(n, m) == 1;
    CHECK(chars.size() == phi);
    // Orthogonality: sum over n of chi(n) is phi(m) for the principal character, 0 otherwise.
    for (const auto& chi : chars) {
      std::complex<double> s = 0;
      for (std::uint64_t n = 0; n < m; ++n) s += chi.value(n);
      CHECK(std::abs(s - (chi.is_principal() ? double(phi) : 0.0)) < 1e-9);
      for (std::uint64_t a = 1; a < m; ++a)
        for (std::uint64_t b = 1; b < m; b += 3)
          CHECK(std::abs(chi.value(a * b) - chi.value(a) * chi.value(b)) < 1e-12);
    }
  }
  CHECK(DirichletCharacter::principal(2).matches(PlaceSet({2})));
  CHECK(c4[1].matches(PlaceSet({2})));
  CHECK(!DirichletCharacter::principal(6).matches(PlaceSet({2})));
  CHECK_THROWS_AS(DirichletCharacter::all(0), ContractError);
}

TEST_CASE("divisor sums") {
  PlaceSet S({2});
  const auto chi = DirichletCharacter::principal(2);
  std::int64_t brute = 0;
  for (std::uint64_t n = 1; n < 500; n += 2) brute += brute_d(n);
  DivisorSum d = sum_divisor_coprime(500, S, chi);
  CHECK(d.exact);
  CHECK(d.re == brute);
  CHECK(d.im == 0);

  // Twisted by the character mod 4: sum chi(n) d(n).
  const auto chi4 = DirichletCharacter::all(4)[1];
  std::int64_t tw = 0;
  for (std::uint64_t n = 1; n < 500; n += 2) tw += (n % 4 == 1 ? 1 : -1) * brute_d(n);
  CHECK(sum_divisor_coprime(500, S, chi4).re == tw);

  // Thread count does not change the result.
  const DivisorSum a = sum_divisor_coprime(200000, S, chi, 1);
  const DivisorSum b = sum_divisor_coprime(200000, S, chi, 4);
  CHECK(a.re == b.re);

  for (std::uint64_t X : {10000, 100000}) {
    DivisorSum r = sum_divisor_coprime(X, S, chi, 2);
    CHECK(std::abs(r.value.real() - r.main) <= 5 * std::sqrt(double(X)));
  }
  CHECK_THROWS_AS(sum_divisor_coprime(100, S, DirichletCharacter::principal(6)), ContractError);
}

TEST_CASE("prime sums") {
  PlaceSet S({2});
  CHECK(prime_log_sum(10, S) ==
        LogNumber::log(3, rat(1, 2)) + LogNumber::log(5, rat(1, 4)) + LogNumber::log(7, rat(1, 6)));
  CHECK(-zeta_log_derivative(2.0L) == doctest::Approx(0.5699609930945).epsilon(1e-12));
  const double c = prime_quadratic_constant(S, 1e-14);
  CHECK(c == doctest::Approx(0.5699609930945 - std::log(2.0) / 3).epsilon(1e-12));
  const TruncatedSum t = prime_quadratic_direct(S, 1000000);
  CHECK(std::abs(t.partial - c) <= t.tail_bound);
  CHECK(t.partial < c);
  CHECK_THROWS_AS(prime_quadratic_constant(S, 1e-20), AccuracyError);
  CHECK_THROWS_AS(zeta_log_derivative(1.0L), ContractError);
}

TEST_CASE("L-values") {
  const auto triv = DirichletCharacter::principal(1);
  CHECK(std::abs(l_value(triv, 2.0, 1e-12) - kPi * kPi / 6) < 1e-10);
  const auto chi4 = DirichletCharacter::all(4)[1];
  CHECK(std::abs(l_value(chi4, 1.0, 1e-12) - kPi / 4) < 1e-10);
  CHECK(std::abs(l_value(DirichletCharacter::principal(2), 2.0, 1e-12) - kPi * kPi / 8) < 1e-10);
  // zeta(1/2 + 14.134725 i) is close to the first zero.
  CHECK(std::abs(l_value(triv, {0.5, 14.134725141734693}, 1e-10)) < 1e-8);
  CHECK(std::abs(hurwitz_zeta_regular(1.0, 1.0, 1e-12) - kEuler) < 1e-10);
  CHECK_THROWS_AS(l_value(triv, 1.0, 1e-12), PoleError);
  CHECK_THROWS_AS(l_value(triv, 0.25, 1e-12), ContractError);
}

TEST_CASE("convolution sums") {
  PlaceSet S({2});
  const auto chi = DirichletCharacter::principal(2);
  const std::complex<double> s(0, 0.3);
  std::complex<double> brute = 0;
  for (int a = 1; a < 300; a += 2)
    for (int b = 1; a * b < 300; b += 2) brute += std::pow(double(a), s) * std::pow(double(b), -s);
  CHECK(std::abs(convolution_sum(300, s, chi, chi, S) - brute) < 1e-9);
  CHECK(convolution_sum(50000, s, chi, chi, S, 1) == convolution_sum(50000, s, chi, chi, S, 3));
  for (std::uint64_t X : {1000, 10000, 100000}) {
    const auto diff = convolution_sum(X, s, chi, chi, S) - convolution_main_term(double(X), s, chi, chi, S);
    CHECK(std::abs(diff) / std::pow(double(X), 0.75) <= 10);
  }
  CHECK_THROWS_AS(convolution_sum(100, {0.1, 0.3}, chi, chi, S), ContractError);
}
