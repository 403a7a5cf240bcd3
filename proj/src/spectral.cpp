#include "tracecheck/spectral.hpp"

#include <cmath>
#include <complex>

#include <mpfr.h>

#include "tracecheck/arith.hpp"
#include "tracecheck/errors.hpp"
#include "tracecheck/hyperbolic.hpp"
#include "tracecheck/parallel.hpp"
#include "tracecheck/shells.hpp"

namespace tc {

namespace {

Rational prat(Prime p) { return Rational(BigInt(p)); }

std::uint64_t radical(const PlaceSet& S) {
  std::uint64_t m = 1;
  for (Prime q : S.primes()) m *= q;
  return m;
}

double euler_sq(const PlaceSet& S) {
  const double c = to_double(S.euler_factor());
  return c * c;
}

}  // namespace

LogNumber tr_xi0_place(Prime q, const HeckeBall& f) { return tr_xi0_nonarch(q, spherical_theta_hat(q, f)); }

double tr_xi0_product(const PlaceSet& S, const TestFunctionSpec& f, double tol) {
  double prod = tr_xi0_arch(f.arch, tol).value;
  for (Prime q : S.primes()) prod *= tr_xi0_place(q, f.at(q)).to_double();
  return prod;
}

double coefficient_B(const PlaceSet& S, const TestFunctionSpec& f, double tol) {
  return -0.5 * euler_sq(S) * tr_xi0_product(S, f, tol);
}

double residual_partial_sum(std::uint64_t X, const PlaceSet& S, const TestFunctionSpec& f, unsigned threads) {
  const DivisorSum d = sum_divisor_coprime(X, S, DirichletCharacter::principal(radical(S)), threads);
  return 0.25 * -1.0 * tr_xi0_product(S, f) * d.value.real();
}

double residual_main(double X, const PlaceSet& S, const TestFunctionSpec& f) {
  const double B = coefficient_B(S, f);
  const double xlogx = X > 0 ? X * std::log(X) : 0.0;
  return 0.5 * B * (xlogx + (2 * gamma_S(S) - 1) * X);
}

double hyp_deg1_main(double X, double B) { return -B * X; }

double jhat_main(double X, double B, const PlaceSet& S) { return prime_quadratic_constant(S, 1e-14) * B * X; }

double jtilde_main(double X, double B, const PlaceSet& S) {
  const double xlogx = X > 0 ? X * std::log(X) : 0.0;
  return -0.5 * B * (xlogx - X) + jhat_main(X, B, S);
}

double arch_completed_constant() {
  mpfr_t g, t;
  mpfr_inits2(128, g, t, static_cast<mpfr_ptr>(nullptr));
  mpfr_const_euler(g, MPFR_RNDN);
  mpfr_set_ui(t, 2, MPFR_RNDN);
  mpfr_log(t, t, MPFR_RNDN);
  mpfr_mul_ui(t, t, 2, MPFR_RNDN);
  mpfr_sub(g, g, t, MPFR_RNDN);
  mpfr_const_pi(t, MPFR_RNDN);
  mpfr_log(t, t, MPFR_RNDN);
  mpfr_sub(g, g, t, MPFR_RNDN);
  const double out = mpfr_get_d(g, MPFR_RNDN);
  mpfr_clears(g, t, static_cast<mpfr_ptr>(nullptr));
  return out;
}

// Lambda'/Lambda(s) = -log(pi)/2 + psi(s/2)/2 + zeta'/zeta(s), psi(1/2) = -gamma - 2 log 2,
// and zeta'/zeta(1 + 2s) = -1/(2s) + gamma + O(s).
double completed_zeta_finite_part() { return 0.5 * arch_completed_constant(); }

LimitFormTerms limit_form_terms(Prime p, const HeckeBall& f) {
  if (!is_prime(p)) throw ContractError("limit form needs a prime");
  if (f.m != 0 || f.scaled) throw ContractError("limit form check is implemented for spherical data only");
  const ThetaHatProvider th = spherical_theta_hat(p, f);
  LimitFormTerms t;
  t.tr_xi0 = tr_xi0_nonarch(p, th);
  t.eps_m1 = eps_integral(p, th, -1);
  t.eps_0 = eps_integral(p, th, 0);
  t.log_y1 = log_integral_Y1(p, th);
  t.wtilde = wtilde_tr_zero(p, f);
  const Rational P = prat(p);
  const Rational inv = Rational(1) / P;
  const Rational one_m = Rational(1) - inv;
  const LogNumber logp = LogNumber::log(p);
  LogNumber total;
  if (p == 2) total -= logp * t.tr_xi0 * Rational(2);
  total -= logp * t.tr_xi0 * (Rational(1, 2) * (1 + inv) / one_m);
  for (int eps : {-1, 0}) {
    const Rational c = 2 * (1 - Rational(eps) * inv) / ((1 - Rational(eps)) * one_m * one_m);
    total += logp * (eps == -1 ? t.eps_m1 : t.eps_0) * c;
  }
  total -= t.log_y1 * (2 / one_m);
  total += t.wtilde * Rational(1, 2);
  t.total = total;
  return t;
}

LogNumber limit_form_check(Prime p, const HeckeBall& f) { return limit_form_terms(p, f).total; }

CoefficientLedger coefficient_ledger(const PlaceSet& S, const TestFunctionSpec& f) {
  CoefficientLedger l;
  l.tr_arch = tr_xi0_arch(f.arch).value;
  l.tr_finite_product = LogNumber(1);
  for (Prime q : S.primes()) l.tr_finite_product = l.tr_finite_product * tr_xi0_place(q, f.at(q));
  l.B = -0.5 * euler_sq(S) * l.tr_arch * l.tr_finite_product.to_double();
  l.gamma_S = gamma_S(S);
  l.arch_completed = arch_completed_constant();
  l.completed_fp = completed_zeta_finite_part();
  l.prime_quad = prime_quadratic_constant(S, 1e-14);
  l.F = 0;

  // E over finite places: -(1/4) prod (1-1/q)^2 sum_q wtilde_q prod_{w != q} Tr xi_0(f_w).
  double e = 0, e_ratio = 0;
  for (Prime q : S.primes()) {
    const double tq = tr_xi0_place(q, f.at(q)).to_double();
    const double wq = wtilde_tr_zero(q, f.at(q)).to_double();
    double others = l.tr_arch;
    for (Prime w : S.primes())
      if (w != q) others *= tr_xi0_place(w, f.at(w)).to_double();
    e += wq * others;
    if (tq != 0) e_ratio += 0.5 * wq / tq;
  }
  l.E_finite = -0.25 * euler_sq(S) * e;
  l.E_ratio_finite = e_ratio;

  if (l.B == 0) return l;  // ratios are undefined
  const double ix0 = l.tr_arch / 2;
  const double ix1 = arch_negative_integral(f.arch).value;
  const double linf = arch_log_integral(f.arch).value;
  const double g = 0.57721566490153286061;
  double c = 2 * g - 2 * std::log(2 * M_PI);
  for (Prime q : S.primes()) {
    const double qd = static_cast<double>(q);
    c += (1 + 1 / qd) * std::log(qd) / (1 - 1 / qd);
  }
  l.C_ratio = -0.5 * c + M_PI / 2 * ix1 / ix0;
  l.D_ratio = -linf / ix0;
  for (Prime q : S.primes()) {
    const double qd = static_cast<double>(q);
    const ThetaHatProvider th = spherical_theta_hat(q, f.at(q));
    const double y1 = tr_xi0_nonarch(q, th).to_double() * (1 - 1 / qd) / 2;
    for (int eps : {-1, 0}) {
      const double ei = eps_integral(q, th, eps).to_double();
      l.C_ratio += (1 - eps / qd) / (1 - eps) * std::log(qd) / (1 - 1 / qd) * ei / y1;
    }
    l.D_ratio -= log_integral_Y1(q, th).to_double() / y1;
  }
  l.arch_implied = l.C_ratio + l.D_ratio + l.E_ratio_finite + l.arch_completed;
  return l;
}

std::vector<ResidualRow> residual_table(const std::vector<std::uint64_t>& grid, const PlaceSet& S,
                                        const TestFunctionSpec& f, unsigned threads) {
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] < 2 || (i && grid[i] <= grid[i - 1]))
      throw ContractError("X grid must be strictly increasing and >= 2");
  std::vector<ResidualRow> rows;
  auto add = [&](std::string fam, std::uint64_t X, double partial, double main, double alpha) {
    const double r = partial - main;
    rows.push_back({std::move(fam), X, partial, main, r, r / std::pow(static_cast<double>(X), alpha), alpha});
  };
  const double B = coefficient_B(S, f);
  const double tr = tr_xi0_product(S, f);
  const double c = to_double(S.euler_factor());
  const double gS = gamma_S(S);
  const auto chi = DirichletCharacter::principal(radical(S));
  const std::complex<double> s(0.0, 0.3);
  for (std::uint64_t X : grid) {
    const double x = static_cast<double>(X);
    const double h = deterministic_sum<double>(
        1, X, [&](std::size_t n) { return S.coprime(n) ? 1.0 / static_cast<double>(n) : 0.0; }, threads);
    add("harmonic", X, h, c * (std::log(x) + gS), -1.0);
    const DivisorSum d = sum_divisor_coprime(X, S, chi, threads);
    add("divisor", X, d.value.real(), d.main, 0.5);
    add("residual", X, -0.25 * tr * d.value.real(), residual_main(x, S, f), 0.5);
    const auto cs = convolution_sum(X, s, chi, chi, S, threads);
    add("convolution", X, std::abs(cs), std::abs(convolution_main_term(x, s, chi, chi, S)), 0.75);
    rows.back().residual = std::abs(cs - convolution_main_term(x, s, chi, chi, S));
    rows.back().scaled = rows.back().residual / std::pow(x, 0.75);
  }
  for (const HypRow& r : hyperbolic_sweep(grid, S, f, threads)) {
    const double x = static_cast<double>(r.X);
    add("hyp_deg1", r.X, r.i_sum, hyp_deg1_main(x, B), 2.0 / 3.0);
    add("jhat", r.X, r.jhat_sum, jhat_main(x, B, S), 2.0 / 3.0);
    add("jtilde", r.X, r.jtilde_sum, jtilde_main(x, B, S), 2.0 / 3.0);
  }
  return rows;
}

LedgerReport ledger_report(const PlaceSet& S, const TestFunctionSpec& f, const std::vector<std::uint64_t>& grid,
                           unsigned threads) {
  return {coefficient_ledger(S, f), residual_table(grid, S, f, threads)};
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractError("slope fit needs two or more points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) throw ContractError("slope fit needs distinct abscissae");
  return sxy / sxx;
}

nlohmann::json to_json(const CoefficientLedger& l) {
  return {
      {"B", l.B},
      {"tr_xi0_arch", l.tr_arch},
      {"tr_xi0_finite_product", to_json(l.tr_finite_product)},
      {"C_over_B", l.C_ratio},
      {"D_over_B", l.D_ratio},
      {"E_finite", l.E_finite},
      {"E_finite_over_B", l.E_ratio_finite},
      {"F", l.F},
      {"gamma_S", l.gamma_S},
      {"arch_completed_constant", l.arch_completed},
      {"completed_zeta_finite_part", l.completed_fp},
      {"prime_quadratic_constant", l.prime_quad},
      {"arch_implied_info", l.arch_implied},
  };
}

}  // namespace tc
