#include <doctest.h>

#include <cmath>
#include <random>

#include "tracecheck/errors.hpp"
#include "tracecheck/exactnum.hpp"

using namespace tc;

TEST_CASE("rationals stay canonical") {
  Rational r = rat(6, -4);
  CHECK(numerator(r) == -3);
  CHECK(denominator(r) == 2);
  CHECK(to_string(r) == "-3/2");
  CHECK(parse_rational("10/4") == rat(5, 2));
  CHECK(parse_rational("-7") == rat(-7));
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("x"), ParseError);
  CHECK(rpow(2, -3) == rat(1, 8));
  CHECK(rpow(3, 0) == 1);
}

TEST_CASE("LogNumber algebra is structural") {
  LogNumber a = LogNumber::log(2, rat(4, 3));
  LogNumber b = LogNumber(rat(1, 3)) + LogNumber::log(2, rat(1, 2));
  CHECK((a - a).is_zero());
  CHECK((a + b) == (b + a));
  CHECK(((a + b) + a) == (a + (b + a)));
  // zero coefficients are never stored
  LogNumber c = a - LogNumber::log(2, rat(4, 3));
  CHECK(c.log_terms().empty());
  CHECK(c == LogNumber());
  CHECK((a * rat(3, 4)) == LogNumber::log(2));
  CHECK((LogNumber(rat(2)) * a) == LogNumber::log(2, rat(8, 3)));
  CHECK_THROWS_AS(a * b, DomainError);
  CHECK(b.str() == "1/3 + 1/2*log(2)");
  CHECK(LogNumber().str() == "0");
  CHECK(!(LogNumber::log(2) == LogNumber::log(3)));
}

TEST_CASE("lognum_eval encloses the value") {
  Interval z = lognum_eval(LogNumber(), 10);
  CHECK(z.lo_d == 0.0);
  CHECK(z.hi_d == 0.0);

  Interval a = lognum_eval(LogNumber::log(2, rat(4, 3)), 10);
  CHECK(a.contains(4.0 / 3.0 * std::log(2.0)));
  CHECK(a.hi_d - a.lo_d < 1e-10);

  Interval b = lognum_eval(LogNumber(rat(1, 3)) + LogNumber::log(2, rat(1, 2)), 10);
  CHECK(b.contains(1.0 / 3.0 + 0.5 * std::log(2.0)));

  // 40 digits is beyond double; the decimal strings still bracket the value.
  Interval c = lognum_eval(LogNumber::log(3), 40);
  CHECK(c.lo.substr(0, 12) == "1.0986122886");
  CHECK_THROWS(lognum_eval(LogNumber(1), 0));
}

TEST_CASE("lognum_eval is additive up to the interval width") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> d(-50, 50);
  for (int i = 0; i < 50; ++i) {
    LogNumber x = LogNumber(rat(d(rng), 7)) + LogNumber::log(2, rat(d(rng), 3)) + LogNumber::log(5, rat(d(rng), 11));
    LogNumber y = LogNumber::log(3, rat(d(rng), 13)) + LogNumber::log(2, rat(d(rng), 5));
    Interval ix = lognum_eval(x, 15), iy = lognum_eval(y, 15), is = lognum_eval(x + y, 15);
    CHECK(is.lo_d <= ix.hi_d + iy.hi_d);
    CHECK(is.hi_d >= ix.lo_d + iy.lo_d);
    CHECK(std::fabs(is.mid() - (x + y).to_double()) < 1e-12);
  }
}

TEST_CASE("HalfPowRational evaluation and equality") {
  CHECK(halfpow_eval(HalfPowRational(rat(1))) == 1.0);
  CHECK(halfpow_eval(HalfPowRational(rat(1), {{5, -1}})) == doctest::Approx(0.4472135955).epsilon(1e-12));
  CHECK(halfpow_eval(HalfPowRational(rat(3), {{2, 2}})) == 6.0);

  HalfPowRational a(rat(1), {{3, 3}});      // 3^{3/2}
  HalfPowRational b(rat(3), {{3, 1}});      // 3 * 3^{1/2}
  CHECK(a == b);
  CHECK(!a.is_rational());
  CHECK((a * b).is_rational());
  CHECK((a * b).to_rational() == 27);
  CHECK_THROWS_AS(a.to_rational(), DomainError);
  CHECK((a * a.inverse()).to_rational() == 1);

  HalfPowRational z(rat(0), {{7, 1}});
  CHECK(z.is_zero());
  CHECK(z.half_exps().empty());
  CHECK(HalfPowRational::half_power(2, -4).to_rational() == rat(1, 4));
}

TEST_CASE("halfpow_eval stays within a few ulp") {
  for (long h = -9; h <= 9; ++h) {
    for (Prime p : {2, 3, 5, 7, 11}) {
      const double want = std::pow(static_cast<long double>(p), h / 2.0L);
      const double got = halfpow_eval(HalfPowRational::half_power(p, h));
      CHECK(std::fabs(got - want) <= 4 * std::numeric_limits<double>::epsilon() * want);
    }
  }
}

TEST_CASE("JSON round trip") {
  LogNumber x = LogNumber(rat(-2, 9)) + LogNumber::log(2, rat(4, 3)) + LogNumber::log(7, rat(-1, 6));
  auto j = to_json(x);
  CHECK(j["const"] == "-2/9");
  CHECK(j["log"]["2"] == "4/3");
  CHECK(lognum_from_json(j) == x);
  CHECK_THROWS_AS(lognum_from_json(nlohmann::json{{"log", 1}}), ParseError);
  auto h = to_json(HalfPowRational(rat(1), {{5, -1}}));
  CHECK(h["half_exps"]["5"] == -1);
}
