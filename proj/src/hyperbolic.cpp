#include "tracecheck/hyperbolic.hpp"

#include <cmath>
#include <limits>

#include "tracecheck/arith.hpp"
#include "tracecheck/errors.hpp"
#include "tracecheck/parallel.hpp"

namespace tc {

namespace {

using Factorization = std::vector<std::pair<std::uint64_t, int>>;

const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> ps = primes_below(1u << 16);
  return ps;
}

Factorization factor(std::uint64_t m) {
  Factorization out;
  for (std::uint64_t p : small_primes()) {
    if (p * p > m) break;
    if (m % p) continue;
    int e = 0;
    while (m % p == 0) m /= p, ++e;
    out.push_back({p, e});
  }
  for (std::uint64_t p = (1u << 16) + 1; m > 1 && p * p <= m; p += 2) {
    if (m % p) continue;
    int e = 0;
    while (m % p == 0) m /= p, ++e;
    out.push_back({p, e});
  }
  if (m > 1) out.push_back({m, 1});
  return out;
}

std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> ds{1};
  for (auto [p, e] : factor(n)) {
    const std::size_t sz = ds.size();
    std::uint64_t pk = 1;
    for (int i = 1; i <= e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < sz; ++j) ds.push_back(ds[j] * pk);
    }
  }
  return ds;
}

std::uint64_t ipow(std::uint64_t q, long e) {
  std::uint64_t r = 1;
  for (long i = 0; i < e; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / q) throw ResourceError("support box overflows 64 bits");
    r *= q;
  }
  return r;
}

std::uint64_t strip_S(std::uint64_t m, const PlaceSet& S) {
  for (Prime q : S.primes())
    while (m % q == 0) m /= q;
  return m;
}

long vint(std::uint64_t m, std::uint64_t p) {
  long v = 0;
  while (m % p == 0) m /= p, ++v;
  return v;
}

void check_n(std::uint64_t n, const PlaceSet& S) {
  if (n == 0) throw ContractError("n must be positive");
  if (!S.coprime(n)) throw ContractError("n must be coprime to S");
}

// prod (1 - 1/q) theta_q on split support points. The split theta_q depends
// only on (q, m), so a representative a = q^m, b = -1 fixes it.
double finite_weight(const PlaceSet& S, const TestFunctionSpec& f) {
  HalfPowRational w(1);
  for (Prime q : S.primes()) {
    const HeckeBall& hb = f.at(q);
    const Rational a = rpow(q, hb.m), b(-1);
    w *= theta_p(q, hb, a + b, a * b);
    w *= HalfPowRational(Rational(BigInt(q - 1), BigInt(q)));
  }
  return halfpow_eval(w);
}

double ratio_of(std::int64_t a, std::int64_t b) {
  return (static_cast<double>(a) + static_cast<double>(b)) /
         (2.0 * std::sqrt(std::fabs(static_cast<double>(a) * static_cast<double>(b))));
}

// sum_{p^j | m, p not in S} log p / p^j in floating point.
double lambda_sum_double(std::uint64_t m) {
  double s = 0;
  for (auto [p, e] : factor(m)) {
    const double pd = static_cast<double>(p);
    s += std::log(pd) * (1.0 - std::pow(pd, -e)) / (pd - 1.0);
  }
  return s;
}

LogNumber log_of(std::uint64_t n) {
  LogNumber out;
  for (auto [p, e] : factor(n)) out += LogNumber::log(p, Rational(e));
  return out;
}

std::uint64_t absdiff(std::int64_t a, std::int64_t b) {
  return a > b ? static_cast<std::uint64_t>(a - b) : static_cast<std::uint64_t>(b - a);
}

}  // namespace

SupportBox support_box(const PlaceSet& S, const TestFunctionSpec& f) {
  SupportBox box;
  for (Prime q : S.primes()) {
    const long m = f.at(q).m;
    if (m < 0) throw ContractError("Hecke ball index m must be nonnegative");
    box.valuations[q] = {0, m};
  }
  box.ratio_bound = f.arch.radius;
  return box;
}

std::vector<SupportPoint> enumerate_support(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f) {
  check_n(n, S);
  const SupportBox box = support_box(S, f);
  std::vector<SupportPoint> out;
  if (box.ratio_bound <= 0) return out;
  const auto& qs = S.primes();
  std::vector<long> ms, nu;
  for (Prime q : qs) ms.push_back(box.valuations.at(q).second);
  nu = ms;
  std::uint64_t full = n;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const std::uint64_t qm = ipow(qs[i], ms[i]);
    if (full > (std::uint64_t(1) << 61) / qm) throw ResourceError("support box overflows 64 bits");
    full *= qm;
  }
  const std::vector<std::uint64_t> ds = divisors(n);
  std::vector<long> split(qs.size(), 0);
  while (true) {
    std::uint64_t qa = 1, qb = 1;
    for (std::size_t i = 0; i < qs.size(); ++i) {
      qa *= ipow(qs[i], split[i]);
      qb *= ipow(qs[i], ms[i] - split[i]);
    }
    for (std::uint64_t d : ds) {
      const auto a0 = static_cast<std::int64_t>(d * qa);
      const auto b0 = static_cast<std::int64_t>((n / d) * qb);
      for (int sa : {1, -1})
        for (int sb : {1, -1}) {
          const std::int64_t a = sa * a0, b = sb * b0;
          if (a == b) continue;
          if (std::fabs(ratio_of(a, b)) >= box.ratio_bound) continue;
          out.push_back({a, b, nu});
        }
    }
    std::size_t i = 0;
    for (; i < qs.size(); ++i) {
      if (++split[i] <= ms[i]) break;
      split[i] = 0;
    }
    if (i == qs.size()) break;
  }
  return out;
}

double i_hyp_deg1(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f) {
  double euler = to_double(S.euler_factor());
  double total = 0;
  for (const auto& pt : enumerate_support(n, S, f)) {
    HalfPowRational thq(1);
    const Rational a(pt.a), b(pt.b);
    for (Prime q : S.primes()) thq *= theta_p(q, f.at(q), a + b, a * b);
    total += theta_inf(f.arch, static_cast<double>(pt.a), static_cast<double>(pt.b)) * halfpow_eval(thq);
  }
  return euler * total;
}

double i_hyp_deg1_adelic(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f) {
  double total = 0;
  for (const auto& pt : enumerate_support(n, S, f)) {
    const Rational a(pt.a), b(pt.b);
    HalfPowRational fin(1);
    for (Prime q : S.primes()) fin *= orb_split(q, f.at(q), a, b);
    // Outside S only primes dividing n (a - b) can differ from 1.
    std::map<std::uint64_t, int> ps;
    for (auto [p, e] : factor(n)) ps[p] = e;
    for (auto [p, e] : factor(absdiff(pt.a, pt.b))) ps.emplace(p, 0);
    for (auto [p, e] : ps) {
      if (S.contains(p)) continue;
      fin *= orb_split(p, HeckeBall{e, true, 1}, a, b);
    }
    const double da = static_cast<double>(pt.a), db = static_cast<double>(pt.b);
    const double orb_inf = std::sqrt(std::fabs(da * db)) / std::fabs(da - db) * theta_inf(f.arch, da, db);
    total += orb_inf * halfpow_eval(fin);
  }
  return total;
}

std::vector<JTerm> j_hyp_hat_p_terms(std::uint64_t n, Prime p, const PlaceSet& S, const TestFunctionSpec& f) {
  if (!is_prime(p)) throw ContractError("j_hyp_hat_p needs a prime");
  if (S.contains(p)) throw ContractError("j_hyp_hat_p needs p outside S");
  const double wf = finite_weight(S, f);
  std::vector<JTerm> out;
  for (const auto& pt : enumerate_support(n, S, f)) {
    JTerm t{pt.a, pt.b, wf * theta_inf(f.arch, double(pt.a), double(pt.b)), {}};
    const long v = vint(absdiff(pt.a, pt.b), p);
    Rational c(0);
    for (long j = 1; j <= v; ++j) c += rpow(p, -j);
    if (c != 0) t.logs = LogNumber::log(p, c);
    out.push_back(std::move(t));
  }
  return out;
}

namespace {
double j_total(const std::vector<JTerm>& ts) {
  double s = 0;
  for (const auto& t : ts)
    if (!t.logs.is_zero()) s -= t.weight * t.logs.to_double();
  return s;
}
}  // namespace

double j_hyp_hat_p(std::uint64_t n, Prime p, const PlaceSet& S, const TestFunctionSpec& f) {
  return j_total(j_hyp_hat_p_terms(n, p, S, f));
}

std::vector<JTerm> j_hyp_hat_S_terms(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f) {
  const double wf = finite_weight(S, f);
  std::vector<JTerm> out;
  for (const auto& pt : enumerate_support(n, S, f)) {
    JTerm t{pt.a, pt.b, wf * theta_inf(f.arch, double(pt.a), double(pt.b)), {}};
    const std::uint64_t m = strip_S(absdiff(pt.a, pt.b), S);
    // Lambda(d) != 0 only for prime powers d.
    for (std::uint64_t d : divisors(m)) {
      if (d == 1) continue;
      const auto fd = factor(d);
      if (fd.size() == 1) t.logs += LogNumber::log(fd[0].first, Rational(BigInt(1), BigInt(d)));
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<JTerm> j_hyp_hat_S_terms_by_prime(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f) {
  const std::uint64_t C = truncation_bound(S, f);
  const auto ps = primes_below(C * n + 1);
  const double wf = finite_weight(S, f);
  std::vector<JTerm> out;
  for (const auto& pt : enumerate_support(n, S, f)) {
    JTerm t{pt.a, pt.b, wf * theta_inf(f.arch, double(pt.a), double(pt.b)), {}};
    const std::uint64_t diff = absdiff(pt.a, pt.b);
    for (std::uint64_t p : ps) {
      if (S.contains(p) || diff % p) continue;
      Rational c(0);
      for (long j = 1, v = vint(diff, p); j <= v; ++j) c += rpow(p, -j);
      t.logs += LogNumber::log(p, c);
    }
    out.push_back(std::move(t));
  }
  return out;
}

double j_hyp_hat_S(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f) {
  return j_total(j_hyp_hat_S_terms(n, S, f));
}

std::vector<JTerm> j_tilde_hyp_S_terms(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f) {
  const double wf = finite_weight(S, f);
  const Factorization fn = factor(n);
  std::vector<JTerm> out;
  for (const auto& pt : enumerate_support(n, S, f)) {
    JTerm t{pt.a, pt.b, wf * theta_inf(f.arch, double(pt.a), double(pt.b)), {}};
    const Rational a(pt.a), b(pt.b);
    std::map<std::uint64_t, int> ps;
    for (auto [p, e] : fn) ps[p] = e;
    for (auto [p, e] : factor(absdiff(pt.a, pt.b))) ps.emplace(p, 0);
    for (auto [p, e] : ps) {
      if (S.contains(p)) continue;
      const HeckeBall ball{e, true, 1};
      // worb-tilde / orb at p replaces the p-factor of prod_v orb.
      WeightedOrbital wt = worb_tilde(p, ball, a, b);
      HalfPowRational ratio = wt.scale * orb_split(p, ball, a, b).inverse();
      t.logs += wt.weight * (ratio.to_rational() / 2);
    }
    out.push_back(std::move(t));
  }
  return out;
}

double j_tilde_hyp_S(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f) {
  return j_total(j_tilde_hyp_S_terms(n, S, f));
}

std::uint64_t truncation_bound(const PlaceSet& S, const TestFunctionSpec& f) {
  // a, b are integers with |ab| = n prod q^{m_q}, so |a - b| <= |ab| + 1 <= 2 n prod q^{m_q}.
  std::uint64_t C = 2;
  for (Prime q : S.primes()) C *= ipow(q, f.at(q).m);
  return C;
}

RelationResidual j_relation_check(std::uint64_t n, const PlaceSet& S, const TestFunctionSpec& f) {
  const auto hat = j_hyp_hat_S_terms(n, S, f);
  const auto tilde = j_tilde_hyp_S_terms(n, S, f);
  const LogNumber half_log_n = log_of(n) * Rational(1, 2);
  RelationResidual r;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    // -(hat) + (tilde) + (1/2) log n, per point
    LogNumber bracket = tilde[i].logs - hat[i].logs + half_log_n;
    if (!bracket.is_zero()) r.exact_zero = false;
  }
  double I = 0;
  for (const auto& t : hat) I += t.weight;
  r.numeric = j_total(hat) - j_total(tilde) + 0.5 * std::log(static_cast<double>(n)) * I;
  return r;
}

std::vector<HypRow> hyperbolic_sweep(const std::vector<std::uint64_t>& grid, const PlaceSet& S,
                                     const TestFunctionSpec& f, unsigned threads) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1]) throw ContractError("X grid must be strictly increasing");
  struct Acc {
    double i = 0, jh = 0, jt = 0;
    Acc operator+(const Acc& o) const { return {i + o.i, jh + o.jh, jt + o.jt}; }
  };
  const double wf = finite_weight(S, f);
  auto per_n = [&](std::size_t n) {
    Acc acc;
    if (n == 0 || !S.coprime(n)) return acc;
    const double half_log_n = 0.5 * std::log(static_cast<double>(n));
    for (const auto& pt : enumerate_support(n, S, f)) {
      const double w = wf * theta_inf(f.arch, double(pt.a), double(pt.b));
      if (w == 0) continue;
      const double L = lambda_sum_double(strip_S(absdiff(pt.a, pt.b), S));
      acc.i += w;
      acc.jh -= w * L;
      acc.jt -= w * (L - half_log_n);
    }
    return acc;
  };
  std::vector<HypRow> rows;
  Acc run;
  std::uint64_t prev = 1;
  for (std::uint64_t X : grid) {
    if (X < 1) throw ContractError("X must be positive");
    run = run + deterministic_sum<Acc>(prev, X, per_n, threads);
    prev = X;
    rows.push_back({X, run.i, run.jh, run.jt});
  }
  return rows;
}

}  // namespace tc
