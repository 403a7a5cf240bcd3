#include "tracecheck/orbital.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "tracecheck/errors.hpp"

namespace tc {

namespace {

Rational prat(Prime p) { return Rational(BigInt(p)); }

// v_p(2)
long v2(Prime p) { return p == 2 ? 1 : 0; }

// a, b in Z_p with v(ab) = m
bool split_support(Prime p, long m, const Rational& a, const Rational& b, long* k) {
  if (a == b) throw DomainError("non-regular element: a = b");
  if (a == 0 || b == 0) throw DomainError("split element with a zero eigenvalue");
  if (vp(a, p) < 0 || vp(b, p) < 0) return false;
  if (vp(a * b, p) != m) return false;
  *k = vp(a - b, p);
  return true;
}

void check_m(long m) {
  if (m < 0) throw ContractError("Hecke ball index m must be nonnegative");
}

}  // namespace

HalfPowRational HeckeBall::factor(Prime p) const {
  HalfPowRational f(amplitude);
  if (scaled) f *= HalfPowRational::half_power(p, -m);
  return f;
}

// -------------------------------------------------------------- profiles

double plateau_bump(double x, double inner, double outer) {
  const double ax = std::fabs(x);
  if (ax <= inner) return 1.0;
  if (ax >= outer) return 0.0;
  const double u = (ax - inner) / (outer - inner);
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return b / (a + b);
}

ArchProfile ArchProfile::plateau(double R) {
  if (!(R > 2.0)) throw ContractError("plateau profile needs radius > 2");
  ArchProfile p;
  p.name = R == 4.0 ? "plateau" : "plateau:" + std::to_string(R);
  p.plus = [R](double x) { return plateau_bump(x, R / 2, R); };
  p.minus = [R](double x) { return plateau_bump(x, 1.0, R); };
  p.radius = R;
  return p;
}

ArchProfile ArchProfile::zero() {
  ArchProfile p;
  p.name = "zero";
  p.plus = [](double) { return 0.0; };
  p.minus = [](double) { return 0.0; };
  p.radius = 0;
  return p;
}

ArchProfile ArchProfile::named(const std::string& name) {
  if (name == "plateau") return plateau();
  if (name == "zero") return zero();
  if (name.rfind("plateau:", 0) == 0) {
    try {
      return plateau(std::stod(name.substr(8)));
    } catch (const std::invalid_argument&) {
      throw ParseError("bad profile radius in '" + name + "'");
    }
  }
  throw ParseError("unknown profile '" + name + "'");
}

TestFunctionSpec TestFunctionSpec::spherical(const PlaceSet& S, ArchProfile arch) {
  TestFunctionSpec f;
  for (Prime q : S.primes()) f.finite[q] = HeckeBall{};
  f.arch = std::move(arch);
  return f;
}

const HeckeBall& TestFunctionSpec::at(Prime q) const {
  auto it = finite.find(q);
  if (it == finite.end()) throw ContractError("no test data at prime " + std::to_string(q));
  return it->second;
}

// ------------------------------------------------------- split orbitals

LogNumber WeightedOrbital::value() const {
  if (scale.is_zero()) return LogNumber();
  return weight * scale.to_rational();
}

std::string WeightedOrbital::str() const {
  if (scale.is_zero() || weight.is_zero()) return "0";
  if (scale.is_rational()) return value().str();
  return scale.str() + " * (" + weight.str() + ")";
}

HalfPowRational orb_split(Prime p, const HeckeBall& f, const Rational& a, const Rational& b) {
  check_m(f.m);
  long k = 0;
  if (!split_support(p, f.m, a, b, &k)) return HalfPowRational();
  return f.factor(p) * HalfPowRational(rpow(p, k));
}

WeightedOrbital worb(Prime p, const HeckeBall& f, const Rational& a, const Rational& b) {
  check_m(f.m);
  long k = 0;
  if (!split_support(p, f.m, a, b, &k)) return {};
  Rational c = -Rational(k);
  for (long j = 1; j <= k; ++j) c += rpow(p, -j);
  return {f.factor(p) * HalfPowRational(rpow(p, k)), LogNumber::log(p, 2 * c)};
}

WeightedOrbital worb_hat(Prime p, const HeckeBall& f, const Rational& a, const Rational& b) {
  WeightedOrbital w = worb(p, f, a, b);
  if (w.scale.is_zero()) return w;
  // subtract 2 log|a-b| = -2k log p
  w.weight += LogNumber::log(p, Rational(2 * vp(a - b, p)));
  return w;
}

WeightedOrbital worb_tilde(Prime p, const HeckeBall& f, const Rational& a, const Rational& b) {
  WeightedOrbital w = worb(p, f, a, b);
  if (w.scale.is_zero()) return w;
  const long k = vp(a - b, p);
  // log(|a-b| / |ab|^{1/2}) = (-k + m/2) log p
  w.weight -= LogNumber::log(p, 2 * (Rational(-k) + Rational(f.m, 2)));
  return w;
}

// ---------------------------------------------------------------- theta

HalfPowRational theta_p(Prime p, const HeckeBall& f, const Rational& T, const Rational& N) {
  check_m(f.m);
  const Rational disc = T * T - 4 * N;
  if (disc == 0) throw DomainError("non-regular (T^2 = 4N)");
  const int chi = omega(p, disc);
  if (f.m > 0) {
    if (chi != 1) throw UnsupportedError("theta_p for m > 0 is implemented for split elements only");
    if (N == 0 || vp(T, p) < 0 || vp(N, p) != f.m) return HalfPowRational();
    return f.factor(p) * HalfPowRational::half_power(p, f.m) * HalfPowRational(prat(p) / (prat(p) - 1));
  }
  if (N == 0 || vp(T, p) < 0 || vp(N, p) != 0) return HalfPowRational();
  const long k = k_of(p, T, N);
  const Rational P = prat(p);
  // orb = 1 + sum_{j=1}^k p^j (1 - chi/p)
  const Rational lam = Rational(1) - Rational(chi) / P;
  Rational orb(1);
  for (long j = 1; j <= k; ++j) orb += rpow(p, j) * lam;
  return f.factor(p) * HalfPowRational(orb * rpow(p, -k) / lam);
}

Rational theta_hat_p(Prime p, const HeckeBall& f, const Rational& y) {
  if (f.m != 0) throw UnsupportedError("Theta-hat_p is implemented for m = 0");
  if (y == 0 || y == 1) throw DomainError("Theta-hat_p needs y not in {0, 1}");
  const long v1 = vp(Rational(1) - y, p);
  if (v1 % 2 != 0 || v1 > 2 * v2(p)) return 0;
  const int eps = omega(p, y);
  Rational val(1);
  if (eps != 1) {
    const Rational P = prat(p);
    Rational c = eps == -1 ? Rational(2) / (P + 1) : Rational(1) / P;
    // |2|_p |y|'^{1/2} |1-y|^{-1/2}
    const long E = modified_norm_exponent(p, y);
    val -= c * rpow(p, -v2(p) - E / 2 + v1 / 2);
  }
  return val * f.amplitude;
}

Rational theta_hat_from_theta(Prime p, const HeckeBall& f, const Rational& y) {
  if (f.m != 0) throw UnsupportedError("Theta-hat_p is implemented for m = 0");
  if (y == 0 || y == 1) throw DomainError("Theta-hat_p needs y not in {0, 1}");
  const Rational one_my = Rational(1) - y;
  const long v1 = vp(one_my, p);
  // N = z^2 (1-y)/4 is a unit only on v(z) = c, and T = z must be integral.
  if (v1 % 2 != 0) return 0;
  const long c = v2(p) - v1 / 2;
  if (c < 0) return 0;
  const Rational z = rpow(p, c);
  HalfPowRational th = theta_p(p, f, z, z * z * one_my / 4);
  return th.to_rational() * (Rational(1) - Rational(1) / prat(p));
}

ThetaHatProvider spherical_theta_hat(Prime p, const HeckeBall& f) {
  if (f.m != 0) throw UnsupportedError("Theta-hat_p is implemented for m = 0");
  const Rational amp = f.amplitude;
  const Rational P = prat(p);
  const Rational two_p = rpow(p, -v2(p));
  KernelSpec k;
  k.name = "Theta-hat_" + std::to_string(p);
  k.support = Predicate::theta_hat_support(p);
  k.terms = [amp, P, two_p](const CellProfile& prof) {
    if (!prof.omega_known) throw ContractError("Theta-hat kernel needs omega on every atom");
    std::vector<Monomial> ts{{amp}};
    if (prof.omega == -1) ts.push_back({-amp * two_p * 2 / (P + 1), 1, -1});
    if (prof.omega == 0) ts.push_back({-amp * two_p / P, 1, -1});
    return ts;
  };
  return k;
}

// ------------------------------------------------------- weighted traces

LogNumber wtr_hat_hecke(Prime p, long m) {
  check_m(m);
  Rational c(0);
  for (long k = 0; k <= m; ++k)
    for (long j = 1; j <= std::min(k, m - k); ++j) c += rpow(p, -j);
  c *= 2;
  if (m % 2 == 0) {
    const Rational P = prat(p);
    c += 2 * rpow(p, -m / 2 + 1) / ((P * P - 1) * (P - 1));
  }
  return LogNumber::log(p, c);
}

LogNumber wtilde_tr_zero(Prime p, const HeckeBall& f) {
  if (f.m != 0) throw ContractError("wtilde_tr_zero needs m = 0; use wtr_hat_hecke for m > 0");
  // 2 (1 - 1/p)^{-1} int_{Z_p^x} (1 - |1-y|) / (p - 1) dy * log p
  const Rational P = prat(p);
  ShellRegion units = ShellRegion::partition(p).filter(Predicate::valuation(Constraint::EQ, 0));
  KernelSpec k;
  k.name = "unit weight";
  k.terms = [P](const CellProfile&) {
    return std::vector<Monomial>{{Rational(1) / (P - 1), 0, 0, 0, LogWeight::LogP},
                                 {-Rational(1) / (P - 1), 0, 2, 0, LogWeight::LogP}};
  };
  return integrate(units, k) * (2 * P / (P - 1) * f.amplitude);
}

LogNumber wtilde_tr_zero_closed(Prime p) {
  const Rational P = prat(p);
  return LogNumber::log(p, 2 * P / ((P - 1) * (P * P - 1)));
}

LogNumber unip_modified_local(Prime p) {
  ShellRegion zp = ShellRegion::partition(p).filter(Predicate::valuation(Constraint::GE, 0));
  return integrate(zp, KernelSpec::monomial({Rational(1), 0, 0, 0, LogWeight::LogAbsY}, "log|y|"));
}

SeriesFactor series_factor(Prime p, long M) {
  if (M < 0) throw ContractError("series cutoff must be nonnegative");
  const Rational P = prat(p);
  const Rational w = (Rational(1) - Rational(1) / P) * (Rational(1) - Rational(1) / P);
  SeriesFactor out;
  for (long m = 0; m <= M; ++m) out.partial += wtr_hat_hecke(p, m) * (w * rpow(p, -m));
  // Generating function of the double sum and of the even-m corrections.
  const Rational x = Rational(1) / P;
  const Rational x3 = x * x * x;
  Rational lim = 2 * x3 / (1 - x3) + 2 * P * (1 - x) * (1 - x) / ((P * P - 1) * (P - 1) * (1 - x3));
  out.limit = LogNumber::log(p, lim);
  out.ratio = lim * (P * P - 1);
  // Termwise bound: the double sum is at most 2(m+1)/(p-1), the correction at most 2p/(p^2-1).
  long double tail = 0, pd = static_cast<long double>(p);
  for (long m = M + 1; m <= M + 2000; ++m)
    tail += (2.0L * (m + 1) / (pd - 1) + 2.0L * pd / (pd * pd - 1)) * std::pow(pd, -static_cast<long double>(m));
  out.tail_bound = static_cast<double>(tail * to_double(w));
  return out;
}

// ---------------------------------------------------------- archimedean

double theta_inf(const ArchProfile& prof, double a, double b) {
  if (a == b) throw DomainError("non-regular element: a = b");
  if (a == 0 || b == 0) throw DomainError("split element with a zero eigenvalue");
  const double x = (a + b) / (2.0 * std::sqrt(std::fabs(a * b)));
  return a * b > 0 ? prof.plus(x) : prof.minus(x);
}

double theta_hat_inf(const ArchProfile& prof, double x) {
  if (x == 1.0) throw DomainError("Theta-hat_inf is singular at x = 1");
  if (x < 1) {
    const double t = 1.0 / std::sqrt(1.0 - x);
    return prof.plus(t) + prof.plus(-t);
  }
  const double t = 1.0 / std::sqrt(x - 1.0);
  return prof.minus(t) + prof.minus(-t);
}

namespace {

Quadrature gk(const std::function<double(double)>& f, double a, double b, double tol) {
  Quadrature q;
  if (!(b > a)) return q;
  q.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, tol, &q.error);
  q.error *= std::max(1.0, std::fabs(q.value));
  return q;
}

Quadrature ts(const std::function<double(double)>& f, double a, double b, double tol) {
  Quadrature q;
  if (!(b > a)) return q;
  boost::math::quadrature::tanh_sinh<double> integ;
  double l1 = 0;
  q.value = integ.integrate(f, a, b, tol, &q.error, &l1);
  q.error *= std::max(1.0, l1);
  return q;
}

Quadrature es(const std::function<double(double)>& f, double a, double tol) {
  Quadrature q;
  boost::math::quadrature::exp_sinh<double> integ;
  double l1 = 0;
  q.value = integ.integrate([&](double t) { return f(a + t); }, 0.0, std::numeric_limits<double>::infinity(),
                            tol, &q.error, &l1);
  q.error *= std::max(1.0, l1);
  return q;
}

Quadrature operator+(Quadrature a, const Quadrature& b) { return {a.value + b.value, a.error + b.error}; }

void require(const Quadrature& q, double tol, const char* what) {
  if (!std::isfinite(q.value) || q.error > tol * std::max(1.0, std::fabs(q.value)) * 100)
    throw AccuracyError(std::string(what) + ": quadrature did not reach the requested tolerance");
}

}  // namespace

Quadrature tr_xi0_arch(const ArchProfile& prof, double tol) {
  if (prof.radius <= 0) return {};
  const double R = prof.radius;
  auto fp = [&](double u) { return prof.plus(std::cosh(u)) + prof.plus(-std::cosh(u)); };
  auto fm = [&](double u) { return prof.minus(std::sinh(u)); };
  Quadrature q = gk(fp, 0.0, std::acosh(std::max(R, 1.0)), tol) + gk(fm, -std::asinh(R), std::asinh(R), tol);
  q.value *= 4;
  q.error *= 4;
  require(q, tol, "tr_xi0_arch");
  return q;
}

Quadrature tr_xi0_arch_direct(const ArchProfile& prof, double tol) {
  if (prof.radius <= 0) return {};
  const double R = prof.radius;
  // Theta-hat vanishes on 0 < |x - 1| < 1/R^2.
  const double lo = 1.0 - 1.0 / (R * R), hi = 1.0 + 1.0 / (R * R);
  auto f = [&](double x) { return theta_hat_inf(prof, x) / (std::fabs(1.0 - x) * std::sqrt(x)); };
  Quadrature q = ts(f, 0.0, 0.5, tol) + gk(f, 0.5, lo, tol) + gk(f, hi, 3.0, tol) + es(f, 3.0, tol);
  q.value *= 2;
  q.error *= 2;
  require(q, tol, "tr_xi0_arch_direct");
  return q;
}

Quadrature arch_negative_integral(const ArchProfile& prof, double tol) {
  if (prof.radius <= 0) return {};
  // x = 1 - 1/t^2 maps (-inf, 0) to t in (0, 1): 2 int_{-1}^{1} theta+(t)/sqrt(1-t^2), then t = sin u.
  auto f = [&](double u) { return prof.plus(std::sin(u)); };
  Quadrature q = gk(f, -M_PI / 2, M_PI / 2, tol);
  q.value *= 2;
  q.error *= 2;
  require(q, tol, "arch_negative_integral");
  return q;
}

Quadrature arch_log_integral(const ArchProfile& prof, double tol) {
  if (prof.radius <= 0) return {};
  const double R = prof.radius;
  const double lo = 1.0 - 1.0 / (R * R), hi = 1.0 + 1.0 / (R * R);
  auto f = [&](double x) {
    return std::log(std::fabs(1.0 - x) / x) * theta_hat_inf(prof, x) / (std::fabs(1.0 - x) * std::sqrt(x));
  };
  Quadrature q = ts(f, 0.0, 0.5, tol) + gk(f, 0.5, lo, tol) + gk(f, hi, 3.0, tol) + es(f, 3.0, tol);
  require(q, tol, "arch_log_integral");
  return q;
}

}  // namespace tc
