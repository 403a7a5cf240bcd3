#include "tracecheck/exactnum.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <mpfr.h>

#include "tracecheck/errors.hpp"

namespace tc {

Rational rat(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

Rational rpow(Prime p, long e) {
  BigInt base = boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(e < 0 ? -e : e));
  return e < 0 ? Rational(BigInt(1), base) : Rational(base);
}

std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt n(s.substr(0, slash));
    BigInt d(s.substr(slash + 1));
    if (d == 0) throw ParseError("zero denominator in '" + s + "'");
    return Rational(n, d);
  } catch (const std::runtime_error&) {
    throw ParseError("not a rational: '" + s + "'");
  }
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

// ---------------------------------------------------------------- LogNumber

LogNumber::LogNumber(const Rational& c) : constant_(c) {}

LogNumber LogNumber::log(Prime p, const Rational& coeff) {
  LogNumber x;
  if (coeff != 0) x.logs_[p] = coeff;
  return x;
}

Rational LogNumber::log_coeff(Prime p) const {
  auto it = logs_.find(p);
  return it == logs_.end() ? Rational(0) : it->second;
}

LogNumber& LogNumber::operator+=(const LogNumber& o) {
  constant_ += o.constant_;
  for (const auto& [p, c] : o.logs_) {
    auto& slot = logs_[p];
    slot += c;
    if (slot == 0) logs_.erase(p);
  }
  return *this;
}

LogNumber& LogNumber::operator-=(const LogNumber& o) { return *this += -o; }

LogNumber& LogNumber::operator*=(const Rational& c) {
  if (c == 0) {
    constant_ = 0;
    logs_.clear();
    return *this;
  }
  constant_ *= c;
  for (auto& [p, v] : logs_) v *= c;
  return *this;
}

LogNumber LogNumber::operator-() const {
  LogNumber r = *this;
  r *= Rational(-1);
  return r;
}

LogNumber operator*(const LogNumber& a, const LogNumber& b) {
  if (!a.is_rational() && !b.is_rational())
    throw DomainError("product of two LogNumbers with log terms is not representable");
  if (a.is_rational()) return b * a.constant();
  return a * b.constant();
}

double LogNumber::to_double() const {
  double v = tc::to_double(constant_);
  for (const auto& [p, c] : logs_) v += tc::to_double(c) * std::log(static_cast<double>(p));
  return v;
}

std::string LogNumber::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  auto emit = [&](const Rational& c, const std::string& tail) {
    Rational mag = c < 0 ? Rational(-c) : c;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (tail.empty()) {
      os << to_string(mag);
    } else if (mag == 1) {
      os << tail;
    } else {
      os << to_string(mag) << "*" << tail;
    }
  };
  if (constant_ != 0) emit(constant_, "");
  for (const auto& [p, c] : logs_) emit(c, "log(" + std::to_string(p) + ")");
  return os.str();
}

// ---------------------------------------------------------- HalfPowRational

HalfPowRational::HalfPowRational(const Rational& c) : coeff_(c) {}

HalfPowRational::HalfPowRational(const Rational& c, std::map<Prime, long> half_exps)
    : coeff_(c), exps_(std::move(half_exps)) {
  normalize();
}

HalfPowRational HalfPowRational::half_power(Prime p, long h) {
  return HalfPowRational(Rational(1), {{p, h}});
}

void HalfPowRational::normalize() {
  if (coeff_ == 0) {
    exps_.clear();
    return;
  }
  for (auto it = exps_.begin(); it != exps_.end();) {
    if (it->second == 0)
      it = exps_.erase(it);
    else
      ++it;
  }
}

bool HalfPowRational::is_rational() const {
  for (const auto& [p, h] : exps_)
    if (h % 2 != 0) return false;
  return true;
}

Rational HalfPowRational::to_rational() const {
  if (!is_rational()) throw DomainError("value " + str() + " is irrational");
  Rational r = coeff_;
  for (const auto& [p, h] : exps_) r *= rpow(p, h / 2);
  return r;
}

HalfPowRational& HalfPowRational::operator*=(const HalfPowRational& o) {
  coeff_ *= o.coeff_;
  for (const auto& [p, h] : o.exps_) exps_[p] += h;
  normalize();
  return *this;
}

HalfPowRational HalfPowRational::inverse() const {
  if (coeff_ == 0) throw DomainError("inverse of zero");
  std::map<Prime, long> inv;
  for (const auto& [p, h] : exps_) inv[p] = -h;
  return HalfPowRational(Rational(1) / coeff_, inv);
}

namespace {
// Canonical form: integral powers folded into the coefficient, the remaining
// set of primes carrying a lone square root.
std::pair<Rational, std::vector<Prime>> canonical(const HalfPowRational& x) {
  Rational c = x.coeff();
  std::vector<Prime> roots;
  for (const auto& [p, h] : x.half_exps()) {
    long fl = (h >= 0) ? h / 2 : -((-h + 1) / 2);
    c *= rpow(p, fl);
    if (h - 2 * fl == 1) roots.push_back(p);
  }
  if (c == 0) roots.clear();
  return {c, roots};
}
}  // namespace

bool operator==(const HalfPowRational& a, const HalfPowRational& b) {
  return canonical(a) == canonical(b);
}

std::string HalfPowRational::str() const {
  std::string s = to_string(coeff_);
  for (const auto& [p, h] : exps_) {
    s += "*" + std::to_string(p) + "^(" + std::to_string(h) + "/2)";
  }
  return s;
}

double halfpow_eval(const HalfPowRational& x) {
  auto [c, roots] = canonical(x);
  double v = to_double(c);
  for (Prime p : roots) v *= std::sqrt(static_cast<double>(p));
  return v;
}

// ------------------------------------------------------------- lognum_eval

namespace {

struct Mpfr {
  mpfr_t v;
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v, prec); mpfr_set_zero(v, 1); }
  ~Mpfr() { mpfr_clear(v); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
};

// Encloses r*log p (or r itself when p == 0) in [lo, hi].
void enclose_term(const Rational& r, Prime p, mpfr_prec_t prec, mpfr_t lo, mpfr_t hi) {
  if (p == 0) {
    mpfr_set_q(lo, r.backend().data(), MPFR_RNDD);
    mpfr_set_q(hi, r.backend().data(), MPFR_RNDU);
    return;
  }
  Mpfr l(prec), u(prec);
  mpfr_set_ui(l.v, static_cast<unsigned long>(p), MPFR_RNDN);  // exact for p < 2^prec
  mpfr_set_ui(u.v, static_cast<unsigned long>(p), MPFR_RNDN);
  mpfr_log(l.v, l.v, MPFR_RNDD);
  mpfr_log(u.v, u.v, MPFR_RNDU);
  const BigInt num = numerator(r);
  const BigInt den = denominator(r);
  // For negative r the upper log bound produces the lower product bound.
  mpfr_ptr lsrc = r >= 0 ? l.v : u.v;
  mpfr_ptr usrc = r >= 0 ? u.v : l.v;
  mpfr_mul_z(lo, lsrc, num.backend().data(), MPFR_RNDD);
  mpfr_div_z(lo, lo, den.backend().data(), MPFR_RNDD);
  mpfr_mul_z(hi, usrc, num.backend().data(), MPFR_RNDU);
  mpfr_div_z(hi, hi, den.backend().data(), MPFR_RNDU);
}

std::string print(mpfr_t x, int digits, mpfr_rnd_t rnd) {
  char* buf = nullptr;
  if (rnd == MPFR_RNDD)
    mpfr_asprintf(&buf, "%.*RDe", digits, x);
  else
    mpfr_asprintf(&buf, "%.*RUe", digits, x);
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

}  // namespace

Interval lognum_eval(const LogNumber& x, int precision) {
  if (precision < 1) throw ContractError("precision must be >= 1");
  Interval out;
  if (x.is_zero()) {
    out.lo = out.hi = "0";
    return out;
  }
  mpfr_prec_t prec = static_cast<mpfr_prec_t>(precision * 3.33) + 64;
  for (int attempt = 0; attempt < 8; ++attempt, prec *= 2) {
    Mpfr lo(prec), hi(prec), tlo(prec), thi(prec), width(prec), bound(prec);
    enclose_term(x.constant(), 0, prec, lo.v, hi.v);
    for (const auto& [p, c] : x.log_terms()) {
      enclose_term(c, p, prec, tlo.v, thi.v);
      mpfr_add(lo.v, lo.v, tlo.v, MPFR_RNDD);
      mpfr_add(hi.v, hi.v, thi.v, MPFR_RNDU);
    }
    mpfr_sub(width.v, hi.v, lo.v, MPFR_RNDU);
    mpfr_set_ui(bound.v, 10, MPFR_RNDN);
    mpfr_pow_si(bound.v, bound.v, -precision, MPFR_RNDD);
    if (mpfr_less_p(width.v, bound.v)) {
      int digits = precision + 6;
      out.lo = print(lo.v, digits, MPFR_RNDD);
      out.hi = print(hi.v, digits, MPFR_RNDU);
      out.lo_d = mpfr_get_d(lo.v, MPFR_RNDD);
      out.hi_d = mpfr_get_d(hi.v, MPFR_RNDU);
      return out;
    }
  }
  throw AccuracyError("lognum_eval could not reach requested width");
}

// ------------------------------------------------------------------- JSON

nlohmann::json to_json(const LogNumber& x) {
  nlohmann::json logs = nlohmann::json::object();
  for (const auto& [p, c] : x.log_terms()) logs[std::to_string(p)] = to_string(c);
  return {{"const", to_string(x.constant())}, {"log", logs}};
}

LogNumber lognum_from_json(const nlohmann::json& j) {
  try {
    LogNumber x(parse_rational(j.at("const").get<std::string>()));
    for (const auto& [k, v] : j.at("log").items())
      x += LogNumber::log(std::stoull(k), parse_rational(v.get<std::string>()));
    return x;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad LogNumber json: ") + e.what());
  }
}

nlohmann::json to_json(const HalfPowRational& x) {
  nlohmann::json exps = nlohmann::json::object();
  for (const auto& [p, h] : x.half_exps()) exps[std::to_string(p)] = h;
  return {{"coeff", to_string(x.coeff())}, {"half_exps", exps}, {"value", halfpow_eval(x)}};
}

}  // namespace tc
