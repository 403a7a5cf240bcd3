#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "tracecheck/errors.hpp"
#include "tracecheck/hyperbolic.hpp"

using namespace tc;

namespace {

using Pair = std::pair<std::int64_t, std::int64_t>;

std::set<Pair> pairs_of(const std::vector<SupportPoint>& pts) {
  std::set<Pair> s;
  for (const auto& p : pts) s.insert({p.a, p.b});
  return s;
}

// Exhaustive search for S = {2}: integers a != b, 2-adically integral with
// v_2(ab) = m, ab = +-n 2^m, and |a + b| / (2 sqrt|ab|) < R.
std::set<Pair> brute_support(std::int64_t n, long m, double R) {
  std::set<Pair> s;
  const std::int64_t N = n << m;
  for (std::int64_t a = -N; a <= N; ++a) {
    if (a == 0) continue;
    for (std::int64_t b = -N; b <= N; ++b) {
      if (b == 0 || a == b) continue;
      if (std::llabs(a * b) != N) continue;
      const double x = double(a + b) / (2 * std::sqrt(std::fabs(double(a) * double(b))));
      if (std::fabs(x) < R) s.insert({a, b});
    }
  }
  return s;
}

PlaceSet S2() { return PlaceSet({2}); }

}  // namespace

TEST_CASE("support enumeration") {
  const auto f = TestFunctionSpec::spherical(S2());
  CHECK(pairs_of(enumerate_support(1, S2(), f)) == std::set<Pair>{{1, -1}, {-1, 1}});
  const std::set<Pair> three{{1, 3}, {3, 1}, {-1, -3}, {-3, -1}, {1, -3}, {-3, 1}, {3, -1}, {-1, 3}};
  CHECK(pairs_of(enumerate_support(3, S2(), f)) == three);

  for (std::int64_t n : {5, 9, 15, 21, 45, 63}) {
    CHECK(pairs_of(enumerate_support(n, S2(), f)) == brute_support(n, 0, 4.0));
    TestFunctionSpec g = f;
    g.finite[2] = HeckeBall{1};
    CHECK(pairs_of(enumerate_support(n, S2(), g)) == brute_support(n, 1, 4.0));
    g.finite[2] = HeckeBall{2};
    CHECK(pairs_of(enumerate_support(n, S2(), g)) == brute_support(n, 2, 4.0));
  }

  // A narrower profile gives a sub-list.
  const auto narrow = TestFunctionSpec::spherical(S2(), ArchProfile::plateau(2.5));
  for (std::uint64_t n : {315, 1155}) {
    const auto wide = pairs_of(enumerate_support(n, S2(), f));
    const auto small = pairs_of(enumerate_support(n, S2(), narrow));
    CHECK(small.size() < wide.size());
    CHECK(std::includes(wide.begin(), wide.end(), small.begin(), small.end()));
  }
  CHECK(enumerate_support(3, S2(), TestFunctionSpec::spherical(S2(), ArchProfile::zero())).empty());
  CHECK_THROWS_AS(enumerate_support(6, S2(), f), ContractError);
  CHECK_THROWS_AS(enumerate_support(15, PlaceSet({2, 3}), TestFunctionSpec::spherical(PlaceSet({2, 3}))),
                  ContractError);
}

TEST_CASE("I_hyp degree one") {
  const auto f = TestFunctionSpec::spherical(S2());
  // Unit split pairs: (1/2) theta_inf * theta_2 with theta_2 = 2.
  double expect = 0;
  for (const auto& pt : enumerate_support(3, S2(), f)) expect += theta_inf(f.arch, double(pt.a), double(pt.b));
  CHECK(i_hyp_deg1(3, S2(), f) == doctest::Approx(expect).epsilon(1e-14));

  for (std::uint64_t n = 1; n < 200; n += 2) {
    const double t = i_hyp_deg1(n, S2(), f), a = i_hyp_deg1_adelic(n, S2(), f);
    CHECK(std::abs(t - a) <= 1e-10 * std::max(1.0, std::abs(t)));
  }
  const PlaceSet S23({2, 3});
  TestFunctionSpec g = TestFunctionSpec::spherical(S23);
  g.finite[3] = HeckeBall{1};
  for (std::uint64_t n : {1, 5, 7, 35, 55, 77}) {
    const double t = i_hyp_deg1(n, S23, g), a = i_hyp_deg1_adelic(n, S23, g);
    CHECK(std::abs(t - a) <= 1e-10 * std::max(1.0, std::abs(t)));
  }
  CHECK(i_hyp_deg1(9, S2(), TestFunctionSpec::spherical(S2(), ArchProfile::zero())) == 0.0);
}

TEST_CASE("J-hat per prime and truncation") {
  const auto f = TestFunctionSpec::spherical(S2());
  // Independent re-summation at n = 5, p = 3.
  double expect = 0;
  for (const auto& pt : enumerate_support(5, S2(), f)) {
    std::int64_t d = std::llabs(pt.a - pt.b);
    double s = 0, w = 1.0 / 3;
    while (d % 3 == 0) {
      d /= 3;
      s += std::log(3.0) * w;
      w /= 3;
    }
    expect -= 0.5 * theta_inf(f.arch, double(pt.a), double(pt.b)) * 2 * s;
  }
  CHECK(expect != 0.0);
  CHECK(j_hyp_hat_p(5, 3, S2(), f) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(j_hyp_hat_p(1, 5, S2(), f) == 0.0);
  CHECK_THROWS_AS(j_hyp_hat_p(5, 2, S2(), f), ContractError);
  CHECK_THROWS_AS(j_hyp_hat_p(5, 9, S2(), f), ContractError);

  const std::uint64_t C = truncation_bound(S2(), f);
  CHECK(C >= 1);
  TestFunctionSpec g = f;
  g.finite[2] = HeckeBall{2};
  CHECK(truncation_bound(S2(), g) > C);
  for (std::uint64_t n = 1; n <= 60; n += 2)
    for (std::uint64_t p = C * n + 1; p <= 2 * C * n; ++p)
      if (is_prime(p) && p != 2) CHECK(j_hyp_hat_p(n, p, S2(), f) == 0.0);
}

TEST_CASE("J-hat Lambda form equals per-prime form") {
  const auto f = TestFunctionSpec::spherical(S2());
  for (std::uint64_t n = 1; n < 1500; n += 2) {
    const auto a = j_hyp_hat_S_terms(n, S2(), f);
    const auto b = j_hyp_hat_S_terms_by_prime(n, S2(), f);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].a == b[i].a);
      CHECK(a[i].logs == b[i].logs);
    }
  }
  // Pairs with |a - b| a power of 2 carry no log.
  const auto t = j_hyp_hat_S_terms(3, S2(), f);
  for (const auto& term : t)
    if (std::llabs(term.a - term.b) == 2 || std::llabs(term.a - term.b) == 4) CHECK(term.logs.is_zero());
}

TEST_CASE("J-hat and J-tilde relation") {
  const auto f = TestFunctionSpec::spherical(S2());
  const RelationResidual r1 = j_relation_check(1, S2(), f);
  CHECK(r1.exact_zero);
  CHECK(r1.numeric == 0.0);
  CHECK(j_hyp_hat_S(1, S2(), f) == j_tilde_hyp_S(1, S2(), f));
  for (std::uint64_t n : {3, 15, 45, 105, 1001}) {
    const RelationResidual r = j_relation_check(n, S2(), f);
    CHECK(r.exact_zero);
    CHECK(std::abs(r.numeric) < 1e-10);
  }
  const auto z = TestFunctionSpec::spherical(S2(), ArchProfile::zero());
  CHECK(j_relation_check(15, S2(), z).numeric == 0.0);
  CHECK(j_hyp_hat_S(15, S2(), z) == 0.0);
}

TEST_CASE("hyperbolic sweep") {
  const auto f = TestFunctionSpec::spherical(S2());
  const std::vector<std::uint64_t> grid{100, 1000, 5000};
  const auto a = hyperbolic_sweep(grid, S2(), f, 1);
  const auto b = hyperbolic_sweep(grid, S2(), f, 4);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a[i].i_sum == b[i].i_sum);
    CHECK(a[i].jhat_sum == b[i].jhat_sum);
    CHECK(a[i].jtilde_sum == b[i].jtilde_sum);
  }
  double I = 0, J = 0, Jt = 0;
  for (std::uint64_t n = 1; n < 100; n += 2) {
    I += i_hyp_deg1(n, S2(), f);
    J += j_hyp_hat_S(n, S2(), f);
    Jt += j_tilde_hyp_S(n, S2(), f);
  }
  CHECK(a[0].i_sum == doctest::Approx(I).epsilon(1e-12));
  CHECK(a[0].jhat_sum == doctest::Approx(J).epsilon(1e-12));
  CHECK(a[0].jtilde_sum == doctest::Approx(Jt).epsilon(1e-12));

  const auto z = hyperbolic_sweep(grid, S2(), TestFunctionSpec::spherical(S2(), ArchProfile::zero()));
  for (const auto& row : z) CHECK(row.i_sum == 0.0);
  CHECK_THROWS_AS(hyperbolic_sweep({100, 50}, S2(), f), ContractError);
}
