#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "tracecheck/exactnum.hpp"
#include "tracecheck/orbital.hpp"
#include "tracecheck/padic.hpp"

namespace tc {

// Valuation window of a and b at each S-prime, and the bound on
// |a + b| / (2 sqrt|ab|) beyond which theta_inf vanishes.
struct SupportBox {
  std::map<Prime, std::pair<long, long>> valuations;
  double ratio_bound = 0;
};
SupportBox support_box(const PlaceSet& S, const TestFunctionSpec& f);

struct SupportPoint {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::vector<long> nu;  // v_q(ab) - v_q(n), one entry per S-prime
};

// All ordered (a, b), a != b in Z^S, ab = +-n q^nu, inside the support box.
std::vector<SupportPoint> enumerate_support(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f);

// prod (1 - 1/q) sum theta_inf theta_q
double i_hyp_deg1(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f);
// sum_gamma prod_v orb(f_v; gamma), with every finite orbital integral exact.
double i_hyp_deg1_adelic(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f);

// A support point with its real weight prod(1-1/q) theta_inf theta_q and an exact log factor.
struct JTerm {
  std::int64_t a = 0;
  std::int64_t b = 0;
  double weight = 0;
  LogNumber logs;
};

// sum_{j=1}^{v_p(a-b)} log p / p^j per support point.
std::vector<JTerm> j_hyp_hat_p_terms(std::uint64_t n, Prime p, const PlaceSet& S, const TestFunctionSpec& f);
double j_hyp_hat_p(std::uint64_t n, Prime p, const PlaceSet& S, const TestFunctionSpec& f);
// sum_{d | (a-b)^{(q)}} Lambda(d)/d per support point.
std::vector<JTerm> j_hyp_hat_S_terms(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f);
// Per-prime terms summed over p <= truncation_bound * n.
std::vector<JTerm> j_hyp_hat_S_terms_by_prime(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f);
double j_hyp_hat_S(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f);
// From worb-tilde at every prime outside S.
std::vector<JTerm> j_tilde_hyp_S_terms(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f);
double j_tilde_hyp_S(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f);

// Every prime p outside S with p > C n has v_p(a - b) = 0 on the support.
std::uint64_t truncation_bound(const PlaceSet& S, const TestFunctionSpec& f);

struct RelationResidual {
  bool exact_zero = true;  // every per-point LogNumber bracket vanished
  double numeric = 0;      // (J-hat - J-tilde) + (1/2) log n I
};
RelationResidual j_relation_check(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f);

struct HypRow {
  std::uint64_t X = 0;
  double i_sum = 0;
  double jhat_sum = 0;
  double jtilde_sum = 0;
};
// Partial sums over n < X, gcd(n, S) = 1, for every X of an increasing grid.
// Deterministic for any thread count.
std::vector<HypRow> hyperbolic_sweep(const std::vector<std::uint64_t>& grid, const PlaceSet& S,
                                     const TestFunctionSpec& f, unsigned threads = 1);

}  // namespace tc
