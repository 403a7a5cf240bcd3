#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tracecheck/exactnum.hpp"
#include "tracecheck/orbital.hpp"
#include "tracecheck/padic.hpp"

namespace tc {

// Tr xi_0(f_q) for a finite place of S, exact.
LogNumber tr_xi0_place(Prime q, const HeckeBall& f);
// prod_{v in S} Tr xi_0(f_v)
double tr_xi0_product(const PlaceSet& S, const TestFunctionSpec& f, double tol = 1e-12);
// B = -(1/2) prod (1 - 1/q)^2 prod_v Tr xi_0(f_v)
double coefficient_B(const PlaceSet& S, const TestFunctionSpec& f, double tol = 1e-12);

// (1/4) M(0, triv) prod Tr xi_0 sum_{n<X, (n,S)=1} d(n), with M(0, triv) = -1.
double residual_partial_sum(std::uint64_t X, const PlaceSet& S, const TestFunctionSpec& f, unsigned threads = 1);
// (1/2) B (X log X + (2 gamma_S - 1) X)
double residual_main(double X, const PlaceSet& S, const TestFunctionSpec& f);

double hyp_deg1_main(double X, double B);
// sum_{p not in S} log p / (p^2 - 1) B X
double jhat_main(double X, double B, const PlaceSet& S);
// -(1/2) B (X log X - X) + sum_{p not in S} log p / (p^2 - 1) B X
double jtilde_main(double X, double B, const PlaceSet& S);

// gamma - 2 log 2 - log pi
double arch_completed_constant();
// Finite part at s = 0 of Lambda'/Lambda(1 + 2s) for the completed zeta function.
double completed_zeta_finite_part();

struct LimitFormTerms {
  LogNumber tr_xi0;
  LogNumber eps_m1;
  LogNumber eps_0;
  LogNumber log_y1;
  LogNumber wtilde;
  LogNumber total;  // right side minus left side; zero when the identity holds
};
LimitFormTerms limit_form_terms(Prime p, const HeckeBall& f = {});
LogNumber limit_form_check(Prime p, const HeckeBall& f = {});

struct ResidualRow {
  std::string family;
  std::uint64_t X = 0;
  double partial = 0;
  double main = 0;
  double residual = 0;
  double scaled = 0;  // residual / X^alpha
  double alpha = 0;
};

struct CoefficientLedger {
  double B = 0;
  double tr_arch = 0;
  LogNumber tr_finite_product;
  double C_ratio = 0;
  double D_ratio = 0;
  double E_finite = 0;        // finite places only
  double E_ratio_finite = 0;  // E_finite / B
  double F = 0;               // spherical finite data: R is the identity
  double gamma_S = 0;
  double arch_completed = 0;
  double completed_fp = 0;
  double prime_quad = 0;
  // (1/2)(Tr R^{-1}R' xi_0(f_inf) - wtilde Tr_inf) / Tr xi_0(f_inf) implied by the
  // global identity; informational only.
  double arch_implied = 0;
};

CoefficientLedger coefficient_ledger(const PlaceSet& S, const TestFunctionSpec& f);
std::vector<ResidualRow> residual_table(const std::vector<std::uint64_t>& grid, const PlaceSet& S,
                                        const TestFunctionSpec& f, unsigned threads = 1);

struct LedgerReport {
  CoefficientLedger ledger;
  std::vector<ResidualRow> rows;
};
LedgerReport ledger_report(const PlaceSet& S, const TestFunctionSpec& f, const std::vector<std::uint64_t>& grid,
                           unsigned threads = 1);

// Least-squares slope of y against x with an intercept.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

nlohmann::json to_json(const CoefficientLedger& l);

}  // namespace tc
