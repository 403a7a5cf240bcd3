#include <doctest.h>

#include "tracecheck/errors.hpp"
#include "tracecheck/padic.hpp"
#include "tracecheck/shells.hpp"

using namespace tc;

namespace {

Predicate integral_part(long L) {
  return Predicate::valuation(Constraint::GE, 0) && Predicate::valuation(Constraint::LE, L);
}

// Counts residues y mod p^K with 0 <= v(y) <= L and omega(y) = eps.
// Exact for K >= L + 3, since omega depends on y mod p^{v + 3} at most.
Rational counted_measure(Prime p, long L, int eps, int K) {
  std::uint64_t M = 1;
  for (int i = 0; i < K; ++i) M *= p;
  std::uint64_t hits = 0;
  for (std::uint64_t y = 1; y < M; ++y) {
    const Rational r(static_cast<long long>(y));
    if (vp(r, p) > L) continue;
    hits += omega(p, r) == eps;
  }
  return Rational(BigInt(hits), BigInt(M));
}

}  // namespace

TEST_CASE("region measures") {
  ShellRegion a(2);
  a.add_cell(Anchor::Zero, 0, 5, 3);
  CHECK(region_measure(a) == rat(1, 8));

  ShellRegion t(2);
  t.add_tail(Anchor::Zero, 2, 2, 1, 3);
  CHECK(region_measure(t) == rat(1, 24));

  for (Prime p : {2, 3, 5, 7}) {
    const ShellRegion part = ShellRegion::partition(p);
    CHECK(region_measure(part.filter(Predicate::valuation(Constraint::GE, 0))) == 1);
    CHECK(region_measure(part.filter(Predicate::valuation(Constraint::GE, 1))) == rat(1, p));
    CHECK_THROWS_AS(region_measure(part), DivergenceError);
  }
}

TEST_CASE("Y classes inside Z_p") {
  for (Prime p : {3, 5, 7}) {
    const ShellRegion zp = ShellRegion::partition(p).filter(Predicate::valuation(Constraint::GE, 0));
    const Rational P(static_cast<long long>(p));
    CHECK(region_measure(zp.filter(Predicate::Y(1))) == P / (2 * (P + 1)));
    CHECK(region_measure(zp.filter(Predicate::Y(-1))) == P / (2 * (P + 1)));
    CHECK(region_measure(zp.filter(Predicate::Y(0))) == 1 / (P + 1));
  }
  const ShellRegion z2 = ShellRegion::partition(2).filter(Predicate::valuation(Constraint::GE, 0));
  CHECK(region_measure(z2.filter(Predicate::Y(1))) == rat(1, 6));
  CHECK(region_measure(z2.filter(Predicate::Y(-1))) == rat(1, 6));
  CHECK(region_measure(z2.filter(Predicate::Y(0))) == rat(2, 3));
}

TEST_CASE("filtered measures agree with residue counting") {
  for (auto [p, L, K] : {std::tuple<Prime, long, int>{2, 3, 7}, {3, 2, 6}, {5, 2, 5}}) {
    const ShellRegion part = ShellRegion::partition(p);
    for (int eps : {-1, 0, 1}) {
      const Rational got = region_measure(part.filter(integral_part(L) && Predicate::Y(eps)));
      CHECK(got == counted_measure(p, L, eps, K));
    }
  }
}

TEST_CASE("kernels") {
  // Reference integral at p = 2 over E and Y_1.
  const ShellRegion r =
      ShellRegion::partition(2).filter(Predicate::Y(1) && Predicate::theta_hat_support(2));
  CHECK(integrate(r, KernelSpec::monomial({Rational(1), 0, -2, -1})) == LogNumber(rat(1, 4)));

  ShellRegion c(3);
  c.add_cell(Anchor::Zero, 1, 1, 0);  // 3 Z_3^x, measure 2/9
  CHECK(integrate(c, KernelSpec::monomial({Rational(1)})) == LogNumber(rat(2, 9)));
  CHECK(integrate(c, KernelSpec::monomial({Rational(1), 0, 0, 0, LogWeight::LogAbsY})) ==
        LogNumber::log(3, rat(-2, 9)));
  CHECK(integrate(c, KernelSpec::monomial({Rational(1), 0, 0, -2})) == LogNumber(rat(2, 3)));
  // |y|^{1/2} on an odd shell leaves sqrt 3 behind.
  CHECK_THROWS_AS(integrate(c, KernelSpec::monomial({Rational(1), 0, 0, 1})), DomainError);

  ShellRegion deep(3);
  deep.add_tail(Anchor::Zero, 2, 2, 1, 1);  // y in 9^n (1 + 3 Z_3), n >= 1
  // |y|^{-1} = 9^n cancels the measure 9^{-n}/3 term by term.
  CHECK_THROWS_AS(integrate(deep, KernelSpec::monomial({Rational(1), 0, 0, -2})), DivergenceError);
  CHECK(integrate(deep, KernelSpec::monomial({Rational(1)})) == LogNumber(rat(1, 24)));

  const Integral led = integrate_ledger(c, KernelSpec::monomial({Rational(1)}, "one"));
  REQUIRE(led.ledger.size() == 1);
  CHECK(led.ledger[0].measure == "2/9");
}

TEST_CASE("region bookkeeping") {
  ShellRegion r(3);
  CHECK_THROWS(r.add_cell(Anchor::Zero, 0, 3, 1));  // residue not a unit
  CHECK_THROWS(r.add_tail(Anchor::Zero, 0, 1, 1, 1));  // odd step
  CHECK_THROWS(r.add_tail(Anchor::Zero, -1, 2, 1, 1));  // negative start moving toward 0
  ShellRegion a(3), b(3);
  a.add_cell(Anchor::Zero, 0, 1, 1);
  b.add_cell(Anchor::Zero, 0, 2, 1);
  CHECK(region_measure(a.united(b)) == rat(2, 3));
  CHECK(region_measure(ShellRegion::partition(3).filter(Predicate::valuation(Constraint::EQ, 0))) == rat(2, 3));
}
