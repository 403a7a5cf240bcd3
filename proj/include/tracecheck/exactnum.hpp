#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <boost/multiprecision/gmp.hpp>
#include <json.hpp>

namespace tc {

using BigInt = boost::multiprecision::mpz_int;
// GMP rationals are kept canonical (reduced, positive denominator) by the backend.
using Rational = boost::multiprecision::mpq_rational;
using Prime = std::uint64_t;

Rational rat(std::int64_t num, std::int64_t den = 1);
// p^e for any integer e.
Rational rpow(Prime p, long e);
std::string to_string(const Rational& r);
Rational parse_rational(const std::string& s);
double to_double(const Rational& r);

// Element of Q + sum_p Q*log p. log p are linearly independent over Q, so
// equality is coefficientwise.
class LogNumber {
 public:
  LogNumber() = default;
  LogNumber(const Rational& c);  // NOLINT: rationals embed implicitly
  LogNumber(std::int64_t c) : LogNumber(Rational(c)) {}  // NOLINT

  static LogNumber log(Prime p, const Rational& coeff = Rational(1));

  const Rational& constant() const { return constant_; }
  const std::map<Prime, Rational>& log_terms() const { return logs_; }
  Rational log_coeff(Prime p) const;

  bool is_zero() const { return constant_ == 0 && logs_.empty(); }
  bool is_rational() const { return logs_.empty(); }

  LogNumber& operator+=(const LogNumber& o);
  LogNumber& operator-=(const LogNumber& o);
  LogNumber& operator*=(const Rational& c);
  LogNumber operator-() const;

  friend LogNumber operator+(LogNumber a, const LogNumber& b) { return a += b; }
  friend LogNumber operator-(LogNumber a, const LogNumber& b) { return a -= b; }
  friend LogNumber operator*(LogNumber a, const Rational& c) { return a *= c; }
  friend LogNumber operator*(const Rational& c, LogNumber a) { return a *= c; }
  // Rejects log*log products with DomainError.
  friend LogNumber operator*(const LogNumber& a, const LogNumber& b);
  friend bool operator==(const LogNumber& a, const LogNumber& b) {
    return a.constant_ == b.constant_ && a.logs_ == b.logs_;
  }

  // Plain double evaluation; use lognum_eval when an enclosure is needed.
  double to_double() const;
  std::string str() const;

 private:
  Rational constant_{0};
  std::map<Prime, Rational> logs_;
};

// c * prod_p p^{h_p/2}, exponents kept exactly.
class HalfPowRational {
 public:
  HalfPowRational() = default;
  HalfPowRational(const Rational& c);  // NOLINT
  HalfPowRational(const Rational& c, std::map<Prime, long> half_exps);

  // p^{h/2}
  static HalfPowRational half_power(Prime p, long h);

  const Rational& coeff() const { return coeff_; }
  const std::map<Prime, long>& half_exps() const { return exps_; }

  bool is_zero() const { return coeff_ == 0; }
  // True when every odd square root cancels, i.e. the value is rational.
  bool is_rational() const;
  // Throws DomainError unless is_rational().
  Rational to_rational() const;

  HalfPowRational& operator*=(const HalfPowRational& o);
  friend HalfPowRational operator*(HalfPowRational a, const HalfPowRational& b) { return a *= b; }
  HalfPowRational inverse() const;

  // Equality of values, independent of how exponents were split.
  friend bool operator==(const HalfPowRational& a, const HalfPowRational& b);

  std::string str() const;

 private:
  void normalize();
  Rational coeff_{0};
  std::map<Prime, long> exps_;
};

struct Interval {
  std::string lo;  // decimal, rounded down
  std::string hi;  // decimal, rounded up
  double lo_d = 0;
  double hi_d = 0;
  double mid() const { return 0.5 * (lo_d + hi_d); }
  bool contains(double x) const { return lo_d <= x && x <= hi_d; }
};

// Rigorous enclosure of width < 10^-precision using MPFR directed rounding.
Interval lognum_eval(const LogNumber& x, int precision);

// Relative error at most a few ulp per factor: integral powers are folded into
// the rational coefficient, and each odd prime contributes one sqrt.
double halfpow_eval(const HalfPowRational& x);

nlohmann::json to_json(const LogNumber& x);
LogNumber lognum_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HalfPowRational& x);

}  // namespace tc
