#include "tracecheck/arith.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include <mpfr.h>

#include "tracecheck/errors.hpp"
#include "tracecheck/parallel.hpp"

namespace tc {

namespace {
constexpr double kPi = 3.14159265358979323846;

// B_{2k} / (2k)! for k = 1..15.
constexpr long double kBernoulliOverFactorial[] = {
    1.0L / 6 / 2,
    -1.0L / 30 / 24,
    1.0L / 42 / 720,
    -1.0L / 30 / 40320,
    5.0L / 66 / 3628800,
    -691.0L / 2730 / 479001600,
    7.0L / 6 / 87178291200.0L,
    -3617.0L / 510 / 20922789888000.0L,
    43867.0L / 798 / 6402373705728000.0L,
    -174611.0L / 330 / 2432902008176640000.0L,
    854513.0L / 138 / 1124000727777607680000.0L,
    -236364091.0L / 2730 / 620448401733239439360000.0L,
    8553103.0L / 6 / 403291461126605635584000000.0L,
    -23749461029.0L / 870 / 304888344611713860501504000000.0L,
    8615841276005.0L / 14322 / 265252859812191058636308480000000.0L,
};
constexpr int kMaxBernoulli = 15;

std::vector<Prime> prime_factors(std::uint64_t m) {
  std::vector<Prime> out;
  for (std::uint64_t p = 2; p * p <= m; ++p) {
    if (m % p == 0) {
      out.push_back(p);
      while (m % p == 0) m /= p;
    }
  }
  if (m > 1) out.push_back(m);
  return out;
}
}  // namespace

// ------------------------------------------------------------------ sieve

LogNumber MultTables::lambda(std::uint64_t n) const {
  if (n == 0 || n >= X) throw ContractError("index outside sieve range");
  return lam_p[n] ? LogNumber::log(lam_p[n]) : LogNumber();
}

MultTables sieve(std::uint64_t X) {
  if (X < 2) throw ContractError("sieve limit must be >= 2");
  if (X > kSieveMemoryLimit) throw ResourceError("sieve limit exceeds memory budget");
  MultTables t;
  t.X = X;
  t.d.assign(X, 0);
  t.phi.assign(X, 0);
  t.mu.assign(X, 0);
  t.lam_p.assign(X, 0);
  t.lam_e.assign(X, 0);
  t.spf.assign(X, 0);
  std::vector<std::uint8_t> cnt(X, 0);  // exponent of spf
  if (X > 1) {
    t.d[1] = 1;
    t.phi[1] = 1;
    t.mu[1] = 1;
  }
  for (std::uint64_t i = 2; i < X; ++i) {
    if (t.spf[i] == 0) {
      t.spf[i] = static_cast<std::uint32_t>(i);
      t.primes.push_back(static_cast<std::uint32_t>(i));
      t.d[i] = 2;
      t.phi[i] = i - 1;
      t.mu[i] = -1;
      t.lam_p[i] = static_cast<std::uint32_t>(i);
      t.lam_e[i] = 1;
      cnt[i] = 1;
    }
    for (std::uint32_t p : t.primes) {
      std::uint64_t n = i * p;
      if (p > t.spf[i] || n >= X) break;
      t.spf[n] = p;
      if (p == t.spf[i]) {
        cnt[n] = static_cast<std::uint8_t>(cnt[i] + 1);
        t.d[n] = t.d[i] / (cnt[i] + 1) * (cnt[i] + 2);
        t.phi[n] = t.phi[i] * p;
        t.mu[n] = 0;
        if (t.lam_p[i] == p) {
          t.lam_p[n] = p;
          t.lam_e[n] = static_cast<std::uint8_t>(t.lam_e[i] + 1);
        }
      } else {
        cnt[n] = 1;
        t.d[n] = t.d[i] * 2;
        t.phi[n] = t.phi[i] * (p - 1);
        t.mu[n] = static_cast<std::int8_t>(-t.mu[i]);
      }
    }
  }
  return t;
}

std::vector<std::uint32_t> primes_below(std::uint64_t X) {
  if (X > 4'000'000'000ULL) throw ResourceError("prime sieve limit too large");
  std::vector<bool> composite(X, false);
  std::vector<std::uint32_t> out;
  for (std::uint64_t i = 2; i < X; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j < X; j += i) composite[j] = true;
  }
  return out;
}

// --------------------------------------------------------- harmonic sums

Interval gamma_S(const PlaceSet& S, int precision) {
  if (precision < 1) throw ContractError("precision must be >= 1");
  mpfr_prec_t prec = static_cast<mpfr_prec_t>(precision * 3.33) + 64;
  mpfr_t lo, hi, t;
  mpfr_inits2(prec, lo, hi, t, static_cast<mpfr_ptr>(nullptr));
  mpfr_const_euler(lo, MPFR_RNDD);
  mpfr_const_euler(hi, MPFR_RNDU);
  for (Prime q : S.primes()) {
    mpfr_set_ui(t, static_cast<unsigned long>(q), MPFR_RNDN);
    mpfr_log(t, t, MPFR_RNDD);
    mpfr_div_ui(t, t, static_cast<unsigned long>(q - 1), MPFR_RNDD);
    mpfr_add(lo, lo, t, MPFR_RNDD);
    mpfr_set_ui(t, static_cast<unsigned long>(q), MPFR_RNDN);
    mpfr_log(t, t, MPFR_RNDU);
    mpfr_div_ui(t, t, static_cast<unsigned long>(q - 1), MPFR_RNDU);
    mpfr_add(hi, hi, t, MPFR_RNDU);
  }
  Interval out;
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*RDe", precision + 6, lo);
  out.lo = buf;
  mpfr_free_str(buf);
  mpfr_asprintf(&buf, "%.*RUe", precision + 6, hi);
  out.hi = buf;
  mpfr_free_str(buf);
  out.lo_d = mpfr_get_d(lo, MPFR_RNDD);
  out.hi_d = mpfr_get_d(hi, MPFR_RNDU);
  mpfr_clears(lo, hi, t, static_cast<mpfr_ptr>(nullptr));
  return out;
}

double gamma_S(const PlaceSet& S) { return gamma_S(S, 20).mid(); }

InvSum sum_inv_coprime(std::uint64_t X, const PlaceSet& S) {
  if (X < 2) throw ContractError("X must be >= 2");
  std::vector<std::uint64_t> ns;
  for (std::uint64_t n = 1; n < X; ++n)
    if (S.coprime(n)) ns.push_back(n);
  // Binary splitting: a single reduction at the end instead of one per term.
  struct PQ {
    BigInt p, q;
  };
  std::function<PQ(std::size_t, std::size_t)> rec = [&](std::size_t lo, std::size_t hi) -> PQ {
    if (hi - lo == 1) return {BigInt(1), BigInt(ns[lo])};
    std::size_t mid = lo + (hi - lo) / 2;
    PQ l = rec(lo, mid), r = rec(mid, hi);
    return {l.p * r.q + r.p * l.q, l.q * r.q};
  };
  PQ s = rec(0, ns.size());
  double c = to_double(S.euler_factor());
  return {Rational(s.p, s.q), c * (std::log(static_cast<double>(X)) + gamma_S(S))};
}

// ---------------------------------------------------------------- characters

DirichletCharacter::DirichletCharacter(std::uint64_t modulus, unsigned order, std::vector<int> exps)
    : modulus_(modulus), order_(order), exps_(std::move(exps)) {
  if (modulus_ == 0 || exps_.size() != modulus_) throw ContractError("bad character table");
  for (std::uint64_t d = 1; d <= modulus_; ++d) {
    if (modulus_ % d) continue;
    bool ok = true;
    for (std::uint64_t n = 1; n < modulus_ && ok; ++n)
      if (exps_[n] >= 0 && n % d == 1 % d && exps_[n] != 0) ok = false;
    if (ok) {
      conductor_ = d;
      break;
    }
  }
}

DirichletCharacter DirichletCharacter::principal(std::uint64_t modulus) {
  std::vector<int> e(modulus);
  for (std::uint64_t n = 0; n < modulus; ++n) e[n] = std::gcd(n, modulus) == 1 ? 0 : -1;
  return DirichletCharacter(modulus, 1, e);
}

std::vector<DirichletCharacter> DirichletCharacter::all(std::uint64_t modulus) {
  if (modulus == 0) throw ContractError("modulus must be >= 1");
  if (modulus > 100000) throw ResourceError("character enumeration modulus too large");
  // Cyclic factors of (Z/mZ)^*: component modulus, order, discrete log table.
  struct Factor {
    std::uint64_t mod;
    unsigned order;
    std::vector<int> dlog;
  };
  std::vector<Factor> factors;
  std::uint64_t m = modulus;
  for (Prime p : prime_factors(modulus)) {
    std::uint64_t pe = 1;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      pe *= p;
      ++e;
    }
    if (p == 2) {
      if (e == 1) continue;
      Factor sign{pe, 2, std::vector<int>(pe, -1)};
      for (std::uint64_t n = 1; n < pe; n += 2) sign.dlog[n] = (n % 4 == 3) ? 1 : 0;
      factors.push_back(sign);
      if (e >= 3) {
        Factor five{pe, static_cast<unsigned>(pe / 4), std::vector<int>(pe, -1)};
        std::uint64_t x = 1;
        for (unsigned j = 0; j < pe / 4; ++j) {
          five.dlog[x] = static_cast<int>(j);
          five.dlog[pe - x] = static_cast<int>(j);
          x = x * 5 % pe;
        }
        factors.push_back(five);
      }
      continue;
    }
    std::uint64_t phi = pe / p * (p - 1);
    for (std::uint64_t g = 2; g < pe; ++g) {
      if (g % p == 0) continue;
      Factor f{pe, static_cast<unsigned>(phi), std::vector<int>(pe, -1)};
      std::uint64_t x = 1;
      bool generator = true;
      for (std::uint64_t j = 0; j < phi; ++j) {
        if (f.dlog[x] != -1) {
          generator = false;
          break;
        }
        f.dlog[x] = static_cast<int>(j);
        x = x * g % pe;
      }
      if (generator) {
        factors.push_back(f);
        break;
      }
    }
  }
  unsigned L = 1;
  for (const auto& f : factors) L = std::lcm(L, f.order);

  std::vector<DirichletCharacter> out;
  std::vector<unsigned> t(factors.size(), 0);
  while (true) {
    std::vector<int> e(modulus, -1);
    for (std::uint64_t n = 0; n < modulus; ++n) {
      if (std::gcd(n, modulus) != 1) continue;
      unsigned long long acc = 0;
      for (std::size_t i = 0; i < factors.size(); ++i)
        acc += static_cast<unsigned long long>(t[i]) * factors[i].dlog[n % factors[i].mod] *
               (L / factors[i].order);
      e[n] = static_cast<int>(acc % L);
    }
    unsigned g = L;
    for (int v : e)
      if (v > 0) g = std::gcd(g, static_cast<unsigned>(v));
    for (int& v : e)
      if (v > 0) v /= static_cast<int>(g);
    out.emplace_back(modulus, L / g, e);
    std::size_t i = 0;
    while (i < t.size() && ++t[i] == factors[i].order) t[i++] = 0;
    if (i == t.size()) break;
  }
  return out;
}

std::complex<double> DirichletCharacter::value(std::uint64_t n) const {
  int k = exponent(n);
  if (k < 0) return 0.0;
  if (exact()) {
    auto [re, im] = gaussian(n);
    return {static_cast<double>(re), static_cast<double>(im)};
  }
  return std::polar(1.0, 2 * kPi * k / order_);
}

std::pair<int, int> DirichletCharacter::gaussian(std::uint64_t n) const {
  if (!exact()) throw UnsupportedError("exact values need order dividing 4");
  int k = exponent(n);
  if (k < 0) return {0, 0};
  switch ((k * (4 / static_cast<int>(order_))) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

bool DirichletCharacter::matches(const PlaceSet& S) const {
  return prime_factors(modulus_) == S.primes();
}

// ------------------------------------------------------------ divisor sums

namespace {
struct Gauss {
  std::int64_t re = 0, im = 0;
  Gauss operator+(const Gauss& o) const { return {re + o.re, im + o.im}; }
  Gauss operator*(const Gauss& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
};
}  // namespace

DivisorSum sum_divisor_coprime(std::uint64_t X, const PlaceSet& S, const DirichletCharacter& chi,
                               unsigned threads) {
  if (!chi.matches(S)) throw ContractError("character zero set differs from the primes of S");
  if (X > kSieveMemoryLimit) throw ResourceError("X exceeds memory budget");
  DivisorSum out;
  double c = to_double(S.euler_factor());
  if (chi.is_principal() && X >= 1) {
    double x = static_cast<double>(X);
    out.main = c * c * (x * std::log(x) + (2 * gamma_S(S) - 1) * x);
  }
  if (X < 2) return out;
  const std::uint64_t M = X - 1;
  // d(n) chi(n) = sum_{ab = n} chi(a) chi(b) because chi is completely multiplicative.
  if (chi.exact()) {
    std::vector<Gauss> prefix(M + 1);
    for (std::uint64_t b = 1; b <= M; ++b) {
      auto [re, im] = chi.gaussian(b);
      prefix[b] = prefix[b - 1] + Gauss{re, im};
    }
    Gauss total = deterministic_sum<Gauss>(
        1, M + 1,
        [&](std::size_t a) {
          auto [re, im] = chi.gaussian(a);
          return Gauss{re, im} * prefix[M / a];
        },
        threads);
    out.exact = true;
    out.re = total.re;
    out.im = total.im;
    out.value = {static_cast<double>(total.re), static_cast<double>(total.im)};
  } else {
    std::vector<std::complex<double>> prefix(M + 1);
    for (std::uint64_t b = 1; b <= M; ++b) prefix[b] = prefix[b - 1] + chi.value(b);
    out.value = deterministic_sum<std::complex<double>>(
        1, M + 1, [&](std::size_t a) { return chi.value(a) * prefix[M / a]; }, threads);
  }
  return out;
}

LogNumber prime_log_sum(std::uint64_t X, const PlaceSet& S) {
  if (X < 2) throw ContractError("X must be >= 2");
  LogNumber out;
  for (std::uint32_t p : primes_below(X)) {
    if (S.contains(p)) continue;
    out += LogNumber::log(p, Rational(BigInt(1), BigInt(p - 1)));
  }
  return out;
}

// ------------------------------------------------------------------- zeta

long double zeta_log_derivative(long double s) {
  if (s <= 1) throw ContractError("zeta_log_derivative needs real s > 1");
  const int N = 40;
  const long double lN = std::log(static_cast<long double>(N));
  long double z = 0, dz = 0;
  for (int n = 1; n < N; ++n) {
    long double t = std::pow(static_cast<long double>(n), -s);
    z += t;
    dz -= std::log(static_cast<long double>(n)) * t;
  }
  long double Ns1 = std::pow(static_cast<long double>(N), 1 - s);
  z += Ns1 / (s - 1) + Ns1 / N / 2;
  dz += -lN * Ns1 / (s - 1) - Ns1 / ((s - 1) * (s - 1)) - lN * Ns1 / N / 2;
  for (int k = 1; k <= 12; ++k) {
    long double poch = 1, dlogpoch = 0;
    for (int i = 0; i < 2 * k - 1; ++i) {
      poch *= s + i;
      dlogpoch += 1 / (s + i);
    }
    long double pw = std::pow(static_cast<long double>(N), -s - 2 * k + 1);
    long double term = kBernoulliOverFactorial[k - 1] * poch * pw;
    z += term;
    dz += term * (dlogpoch - lN);
  }
  return dz / z;
}

double prime_quadratic_constant(const PlaceSet& S, double tol) {
  if (!(tol > 0)) throw ContractError("tol must be positive");
  // sum_p log p / (p^2 - 1) = sum_n Lambda(n) n^{-2} = -zeta'(2)/zeta(2); the
  // Euler-Maclaurin evaluation in long double is accurate to about 1e-18.
  if (tol < 1e-15) throw AccuracyError("requested tolerance below long double accuracy");
  long double v = -zeta_log_derivative(2.0L);
  for (Prime q : S.primes()) v -= std::log(static_cast<long double>(q)) / (static_cast<long double>(q) * q - 1);
  return static_cast<double>(v);
}

TruncatedSum prime_quadratic_direct(const PlaceSet& S, std::uint64_t P) {
  if (P < 3) throw ContractError("cutoff must be >= 3");
  std::vector<double> terms;
  for (std::uint32_t p : primes_below(P)) {
    if (S.contains(p)) continue;
    double pd = p;
    terms.push_back(std::log(pd) / (pd * pd - 1));
  }
  double Pd = static_cast<double>(P);
  return {pairwise_reduce(terms), 4.0 / 3.0 * (std::log(Pd) + 1) / Pd};
}

namespace {
using cd = std::complex<double>;

// (e^w - 1) / w without cancellation near 0.
cd expm1_over(cd w) {
  if (std::abs(w) < 1e-3) return 1.0 + w / 2.0 + w * w / 6.0 + w * w * w / 24.0 + w * w * w * w / 120.0;
  return (std::exp(w) - 1.0) / w;
}
}  // namespace

cd hurwitz_zeta_regular(cd s, double a, double tol) {
  if (!(a > 0)) throw ContractError("Hurwitz parameter must be positive");
  const double sigma = s.real();
  const int K = kMaxBernoulli - 1;
  for (std::uint64_t N = 16; N <= (1u << 22); N *= 2) {
    const double Na = static_cast<double>(N) + a;
    const double lNa = std::log(Na);
    // Remainder bound from the first omitted Euler-Maclaurin term.
    cd poch = 1.0;
    for (int i = 0; i < 2 * K + 1; ++i) poch *= s + static_cast<double>(i);
    double next = std::abs(static_cast<double>(kBernoulliOverFactorial[K]) * poch *
                           std::exp(-(s + static_cast<double>(2 * K + 1)) * lNa));
    double bound = 2 * next * std::abs(s + static_cast<double>(2 * K + 1)) /
                   std::max(1e-300, sigma + 2 * K + 1);
    if (sigma + 2 * K + 1 <= 0 || bound > tol) continue;

    cd sum = 0.0;
    for (std::uint64_t n = 0; n < N; ++n) sum += std::exp(-s * std::log(static_cast<double>(n) + a));
    sum += -lNa * expm1_over((1.0 - s) * lNa);
    cd Nas = std::exp(-s * lNa);
    sum += Nas / 2.0;
    cd pch = s;
    cd pw = Nas / Na;
    for (int k = 1; k <= K; ++k) {
      sum += static_cast<double>(kBernoulliOverFactorial[k - 1]) * pch * pw;
      pch *= (s + static_cast<double>(2 * k - 1)) * (s + static_cast<double>(2 * k));
      pw /= Na * Na;
    }
    return sum;
  }
  throw AccuracyError("Hurwitz zeta: tolerance not reached");
}

cd l_value(const DirichletCharacter& chi, cd s, double tol) {
  if (s.real() < 0.5) throw ContractError("l_value needs Re s >= 1/2");
  if (!(tol > 0)) throw ContractError("tol must be positive");
  if (tol < 1e-14) throw AccuracyError("tolerance below double accuracy");
  if (chi.is_principal() && s == cd(1.0, 0.0)) throw PoleError("L(s, principal) has a pole at s = 1");
  const std::uint64_t q = chi.modulus();
  const double qd = static_cast<double>(q);
  cd acc = 0.0;
  std::uint64_t units = 0;
  for (std::uint64_t a = 1; a <= q; ++a) {
    cd v = chi.value(a);
    if (v == 0.0) continue;
    ++units;
    acc += v * hurwitz_zeta_regular(s, static_cast<double>(a) / qd, tol / (4.0 * qd));
  }
  cd qs = std::exp(-s * std::log(qd));
  cd out = qs * acc;
  if (chi.is_principal()) out += qs * static_cast<double>(units) / (s - 1.0);
  return out;
}

// --------------------------------------------------------------- convolution

cd convolution_sum(std::uint64_t X, cd s, const DirichletCharacter& chi1,
                   const DirichletCharacter& chi2, const PlaceSet& S, unsigned threads) {
  if (s.real() != 0) throw ContractError("convolution_sum needs purely imaginary s");
  if (!chi1.matches(S) || !chi2.matches(S)) throw ContractError("characters must vanish exactly off S-coprime n");
  if (X > kSieveMemoryLimit) throw ResourceError("X exceeds memory budget");
  if (X < 2) return 0.0;
  const std::uint64_t M = X - 1;
  // sum_{ab < X} chi1(a) a^s chi2(b) b^{-s}.
  std::vector<cd> prefix(M + 1);
  for (std::uint64_t b = 1; b <= M; ++b) {
    cd v = chi2.value(b);
    prefix[b] = prefix[b - 1] + (v == 0.0 ? cd(0.0) : v * std::exp(-s * std::log(static_cast<double>(b))));
  }
  return deterministic_sum<cd>(
      1, M + 1,
      [&](std::size_t a) -> cd {
        cd v = chi1.value(a);
        if (v == 0.0) return 0.0;
        return v * std::exp(s * std::log(static_cast<double>(a))) * prefix[M / a];
      },
      threads);
}

cd convolution_main_term(double X, cd s, const DirichletCharacter& chi1,
                         const DirichletCharacter& chi2, const PlaceSet& S) {
  const double c = to_double(S.euler_factor());
  const bool d1 = chi1.is_principal(), d2 = chi2.is_principal();
  if (s == 0.0 && d1 && d2) {
    // Both poles collide; the limit is c (X log X + (2 gamma_S - 1) X).
    return c * c * (X * std::log(X) + (2 * gamma_S(S) - 1) * X);
  }
  const double tol = 1e-12;
  cd out = 0.0;
  if (d1) out += l_value(chi2, 2.0 * s + 1.0, tol) * std::exp((s + 1.0) * std::log(X)) / (s + 1.0);
  if (d2) out += l_value(chi1, 1.0 - 2.0 * s, tol) * std::exp((1.0 - s) * std::log(X)) / (1.0 - s);
  return c * out;
}

}  // namespace tc
