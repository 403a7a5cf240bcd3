#include "tracecheck/shells.hpp"

#include <sstream>

#include "tracecheck/errors.hpp"
#include "tracecheck/padic.hpp"

namespace tc {

namespace {

// a + b sqrt(p)
struct Surd {
  Rational a{0}, b{0};
  Prime p = 2;

  Surd operator+(const Surd& o) const { return {a + o.a, b + o.b, p}; }
  Surd operator-(const Surd& o) const { return {a - o.a, b - o.b, p}; }
  Surd operator*(const Surd& o) const {
    return {a * o.a + Rational(p) * b * o.b, a * o.b + b * o.a, p};
  }
  Surd operator*(const Rational& c) const { return {a * c, b * c, p}; }
  Surd inverse() const {
    Rational norm = a * a - Rational(p) * b * b;
    if (norm == 0) throw DomainError("division by zero in Q(sqrt p)");
    return {a / norm, -b / norm, p};
  }
  bool is_zero() const { return a == 0 && b == 0; }
  std::string str() const {
    if (b == 0) return to_string(a);
    return to_string(a) + " + " + to_string(b) + "*sqrt(" + std::to_string(p) + ")";
  }
};

// p^{h/2}
Surd sqrt_pow(Prime p, long h) {
  if (h % 2 == 0) return {rpow(p, h / 2), 0, p};
  return {0, rpow(p, (h - 1) / 2), p};
}

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

struct Point {
  bool vy_k = false, v1_k = false, E_k = false, om_k = false;
  long vy = 0, v1 = 0, E = 0;
  int om = 0;
};

Point cell_point(Prime p, Anchor anchor, long n, std::uint64_t c, int k) {
  if (p == 2 && k == 0) {
    c = 1;
    k = 1;
  }
  Point pt;
  bool haveA = false;
  Rational A;
  long M = 0;
  if (anchor == Anchor::Zero) {
    pt.vy_k = true;
    pt.vy = n;
    if (k >= 1) {
      haveA = true;
      A = rpow(p, n) * Rational(BigInt(c));
      M = n + k;
    } else if (n != 0) {
      pt.v1_k = true;
      pt.v1 = n > 0 ? 0 : n;
    }
  } else {
    pt.v1_k = true;
    pt.v1 = n;
    if (k >= 1) {
      haveA = true;
      A = Rational(1) + rpow(p, n) * Rational(BigInt(c));
      M = n + k;
    } else if (n > 0) {
      haveA = true;
      A = Rational(1);
      M = n;
    } else if (n < 0) {
      pt.vy_k = true;
      pt.vy = n;
    }
  }

  int r = 0;  // unit part of y known modulo p^r
  std::uint64_t ur = 0;
  if (haveA) {
    long va = vp(A, p);
    if (va < M) {
      pt.vy_k = true;
      pt.vy = va;
      r = static_cast<int>(std::min<long>(M - va, p == 2 ? 3 : 1));
      if (r > 0) ur = unit_residue(unit_part(A, p), p, r);
    }
    if (!pt.v1_k) {
      Rational B = Rational(1) - A;
      if (B != 0 && vp(B, p) < M) {
        pt.v1_k = true;
        pt.v1 = vp(B, p);
      }
    }
  }
  if (!pt.vy_k) return pt;
  const long v = pt.vy;
  if (p != 2) {
    pt.E_k = true;
    pt.E = 2 * floor_div(v, 2);
    if (v % 2 != 0) {
      pt.om_k = true;
      pt.om = 0;
    } else if (r >= 1) {
      pt.om_k = true;
      pt.om = legendre(ur, p);
    }
    return pt;
  }
  if (v % 2 != 0) {
    pt.E_k = pt.om_k = true;
    pt.E = v - 3;
    pt.om = 0;
    return pt;
  }
  if (r >= 2) {
    pt.E_k = true;
    pt.E = (ur % 4 == 1) ? v : v - 2;
    if (ur % 4 == 3) {
      pt.om_k = true;
      pt.om = 0;
    }
  }
  if (r >= 3) {
    pt.om_k = true;
    pt.om = (ur % 8 == 1) ? 1 : (ur % 8 == 5) ? -1 : 0;
  }
  return pt;
}

CellProfile shifted(const CellProfile& prof, long j) {
  CellProfile s = prof;
  for (Affine* a : {&s.n, &s.vy, &s.v1my, &s.E}) a->c0 = a->at(j);
  return s;
}

Rational mass_factor(Prime p, int k) {
  if (p == 2 && k == 0) k = 1;
  return k >= 1 ? rpow(p, -k) : Rational(BigInt(p - 1), BigInt(p));
}

long field(const CellProfile& prof, Constraint::Field f, long j) {
  const Affine& a = f == Constraint::VY ? prof.vy : f == Constraint::V1MY ? prof.v1my : prof.E;
  if (!a.known) throw ContractError("predicate uses a field not determined on the atom");
  return a.at(j);
}

const Affine& field_affine(const CellProfile& prof, Constraint::Field f) {
  return f == Constraint::VY ? prof.vy : f == Constraint::V1MY ? prof.v1my : prof.E;
}

bool check(const Constraint& c, long x) {
  switch (c.op) {
    case Constraint::LE: return x <= c.value;
    case Constraint::GE: return x >= c.value;
    case Constraint::EQ: return x == c.value;
    case Constraint::EVEN: return x % 2 == 0;
    case Constraint::ODD: return x % 2 != 0;
  }
  return false;
}

// Whether the truth value of c is the same for every j >= j0.
bool stable_from(const Constraint& c, const CellProfile& prof, long j0) {
  const Affine& a = field_affine(prof, c.field);
  long x = field(prof, c.field, j0);
  long s = a.slope;
  if (s == 0) return true;
  switch (c.op) {
    case Constraint::EVEN:
    case Constraint::ODD: return s % 2 == 0;
    case Constraint::LE: return s > 0 ? x > c.value : x <= c.value;
    case Constraint::GE: return s > 0 ? x >= c.value : x < c.value;
    case Constraint::EQ: return s > 0 ? x > c.value : x < c.value;
  }
  return false;
}

}  // namespace

std::string Atom::str() const {
  std::ostringstream os;
  os << (anchor == Anchor::Zero ? "" : "1 + ") << "p^";
  if (step == 0)
    os << n0;
  else
    os << "(" << n0 << (step > 0 ? " + " : " - ") << (step > 0 ? step : -step) << "j)";
  if (k == 0)
    os << " Z_p^x";
  else
    os << "(" << residue << " + p^" << k << " Z_p)";
  return os.str();
}

// -------------------------------------------------------------- predicates

Predicate Predicate::Y(int eps) {
  Predicate p;
  p.omegas = std::set<int>{eps};
  return p;
}

Predicate Predicate::theta_hat_support(Prime p) {
  Predicate pr;
  pr.all.push_back({Constraint::V1MY, Constraint::EVEN, 0});
  pr.all.push_back({Constraint::V1MY, Constraint::LE, p == 2 ? 2 : 0});
  return pr;
}

Predicate Predicate::valuation(Constraint::Op op, long value) {
  Predicate p;
  p.all.push_back({Constraint::VY, op, value});
  return p;
}

Predicate Predicate::operator&&(const Predicate& o) const {
  Predicate r = *this;
  r.all.insert(r.all.end(), o.all.begin(), o.all.end());
  if (o.omegas) {
    if (!r.omegas) {
      r.omegas = o.omegas;
    } else {
      std::set<int> both;
      for (int e : *r.omegas)
        if (o.omegas->count(e)) both.insert(e);
      r.omegas = both;
    }
  }
  return r;
}

bool Predicate::holds(const CellProfile& prof, long j) const {
  if (omegas) {
    if (!prof.omega_known) throw ContractError("predicate uses omega, not determined on the atom");
    if (!omegas->count(prof.omega)) return false;
  }
  for (const auto& c : all)
    if (!check(c, field(prof, c.field, j))) return false;
  return true;
}

// ------------------------------------------------------------------ regions

ShellRegion::ShellRegion(Prime p) : p_(p) {
  if (!is_prime(p)) throw ContractError("ShellRegion needs a prime");
}

void ShellRegion::add_cell(Anchor anchor, long n, std::uint64_t residue, int k) {
  if (k < 0 || k > 20) throw ContractError("residue precision out of range");
  if (k == 0) residue = 1;
  const std::uint64_t mod = numerator(rpow(p_, k)).convert_to<std::uint64_t>();
  if (k > 0 && (residue % p_ == 0 || residue >= mod)) throw ContractError("residue must be a unit below p^k");
  atoms_.push_back({anchor, n, 0, residue, k});
}

void ShellRegion::add_tail(Anchor anchor, long n0, long step, std::uint64_t residue, int k) {
  if (step == 0 || step % 2 != 0) throw ContractError("tail step must be even and nonzero");
  if (n0 == 0 || (n0 > 0) != (step > 0)) throw ContractError("tail must move away from valuation 0");
  if (anchor == Anchor::One) {
    long need = std::max<long>(p_ == 2 ? 3 : 1, std::max(k, 1));
    if ((n0 > 0 ? n0 : -n0) < need) throw ContractError("anchor-1 tail starts too shallow");
  }
  add_cell(anchor, n0, residue, k);
  atoms_.back().step = step;
}

ShellRegion ShellRegion::partition(Prime p) {
  ShellRegion r(p);
  const int K = p == 2 ? 3 : 1;
  const std::uint64_t mod = p == 2 ? 8 : p;
  for (std::uint64_t c = 1; c < mod; ++c) {
    if (c % p == 0) continue;
    for (long n0 : {1L, 2L}) r.add_tail(Anchor::Zero, n0, 2, c, K);
    for (long n0 : {-1L, -2L}) r.add_tail(Anchor::Zero, n0, -2, c, K);
    if (c != 1) r.add_cell(Anchor::Zero, 0, c, K);
  }
  // 1 + p^K Z_p minus {1}, split by v(1 - y).
  for (long n0 : {static_cast<long>(K), static_cast<long>(K + 1)}) r.add_tail(Anchor::One, n0, 2, 1, 0);
  return r;
}

CellProfile ShellRegion::profile(const Atom& a) const {
  CellProfile prof;
  const int samples = a.step == 0 ? 1 : 3;
  Point pts[3];
  for (int j = 0; j < samples; ++j) pts[j] = cell_point(p_, a.anchor, a.n0 + a.step * j, a.residue, a.k);
  auto combine = [&](bool Point::*known, long Point::*val) {
    Affine out;
    for (int j = 0; j < samples; ++j)
      if (!(pts[j].*known)) return out;
    out.c0 = pts[0].*val;
    if (samples > 1) {
      out.slope = pts[1].*val - pts[0].*val;
      if (pts[2].*val - pts[1].*val != out.slope) return Affine{};
    }
    out.known = true;
    return out;
  };
  prof.n = {true, a.n0, a.step};
  prof.vy = combine(&Point::vy_k, &Point::vy);
  prof.v1my = combine(&Point::v1_k, &Point::v1);
  prof.E = combine(&Point::E_k, &Point::E);
  prof.omega_known = true;
  for (int j = 0; j < samples; ++j)
    if (!pts[j].om_k || pts[j].om != pts[0].om) prof.omega_known = false;
  prof.omega = pts[0].om;
  return prof;
}

ShellRegion ShellRegion::filter(const Predicate& pred) const {
  ShellRegion out(p_);
  for (const Atom& a : atoms_) {
    CellProfile prof = profile(a);
    if (a.step == 0) {
      if (pred.holds(prof, 0)) out.atoms_.push_back(a);
      continue;
    }
    for (long j = 0;; ++j) {
      if (j > 4096) throw ContractError("filter did not stabilize on a tail");
      bool stable = true;
      for (const auto& c : pred.all) stable = stable && stable_from(c, prof, j);
      if (stable) {
        if (pred.holds(prof, j)) {
          Atom rest = a;
          rest.n0 = a.n0 + a.step * j;
          out.atoms_.push_back(rest);
        }
        break;
      }
      if (pred.holds(prof, j)) out.atoms_.push_back({a.anchor, a.n0 + a.step * j, 0, a.residue, a.k});
    }
  }
  return out;
}

ShellRegion ShellRegion::united(const ShellRegion& o) const {
  if (o.p_ != p_) throw ContractError("union of regions over different primes");
  ShellRegion r = *this;
  r.atoms_.insert(r.atoms_.end(), o.atoms_.begin(), o.atoms_.end());
  return r;
}

// ----------------------------------------------------------------- integrals

Rational region_measure(const ShellRegion& r) {
  const Prime p = r.p();
  Rational total(0);
  for (const Atom& a : r.atoms()) {
    Rational cell = rpow(p, -a.n0) * mass_factor(p, a.k);
    if (a.step == 0) {
      total += cell;
    } else if (a.step > 0) {
      total += cell / (Rational(1) - rpow(p, -a.step));
    } else {
      throw DivergenceError("tail " + a.str() + " has infinite measure");
    }
  }
  return total;
}

KernelSpec KernelSpec::monomial(Monomial m, std::string name) {
  return {std::move(name), [m](const CellProfile&) { return std::vector<Monomial>{m}; }, std::nullopt};
}

KernelSpec KernelSpec::scaled(int alpha2, int beta2, LogWeight w) const {
  KernelSpec out = *this;
  KernelFn inner = terms;
  out.terms = [inner, alpha2, beta2, w](const CellProfile& prof) {
    auto ts = inner(prof);
    for (auto& t : ts) {
      t.alpha2 += alpha2;
      t.beta2 += beta2;
      if (w != LogWeight::None) {
        if (t.weight != LogWeight::None) throw DomainError("kernel would carry a product of logarithms");
        t.weight = w;
      }
    }
    return ts;
  };
  return out;
}

Integral integrate_ledger(const ShellRegion& region, const KernelSpec& kernel) {
  const Prime p = region.p();
  const ShellRegion r = kernel.support ? region.filter(*kernel.support) : region;
  Surd plain{0, 0, p}, logs{0, 0, p};
  Integral out;
  for (const Atom& a : r.atoms()) {
    CellProfile prof = r.profile(a);
    std::vector<Monomial> ts = kernel.terms(shifted(prof, 0));
    if (a.step != 0) {
      for (long j : {1L, 2L})
        if (kernel.terms(shifted(prof, j)) != ts)
          throw ContractError("kernel '" + kernel.name + "' is not constant on " + a.str());
    }
    const Rational mf = mass_factor(p, a.k);
    Surd atom_plain{0, 0, p}, atom_logs{0, 0, p};
    for (const Monomial& m : ts) {
      if (m.coeff == 0) continue;
      auto need = [&](const Affine& f, int e, const char* what) {
        if (e != 0 && !f.known) throw ContractError(std::string("kernel needs ") + what + " on " + a.str());
      };
      need(prof.E, m.alpha2, "|y|'");
      need(prof.v1my, m.beta2, "|1-y|");
      need(prof.vy, m.delta2, "|y|");
      auto h_of = [&](long n, long E, long v1, long vy) {
        return -2 * n - m.alpha2 * (m.alpha2 ? E : 0) - m.beta2 * (m.beta2 ? v1 : 0) -
               m.delta2 * (m.delta2 ? vy : 0);
      };
      const long h0 = h_of(prof.n.c0, prof.E.c0, prof.v1my.c0, prof.vy.c0);
      const long hs = h_of(prof.n.slope, prof.E.slope, prof.v1my.slope, prof.vy.slope);
      long w0 = 1, ws = 0;
      switch (m.weight) {
        case LogWeight::None:
        case LogWeight::LogP: break;
        case LogWeight::LogRatio:
          need(prof.E, 1, "|y|'");
          need(prof.v1my, 1, "|1-y|");
          w0 = prof.E.c0 - prof.v1my.c0;
          ws = prof.E.slope - prof.v1my.slope;
          break;
        case LogWeight::LogAbsY:
          need(prof.vy, 1, "|y|");
          w0 = -prof.vy.c0;
          ws = -prof.vy.slope;
          break;
        case LogWeight::LogAbs1mY:
          need(prof.v1my, 1, "|1-y|");
          w0 = -prof.v1my.c0;
          ws = -prof.v1my.slope;
          break;
      }
      Surd base = sqrt_pow(p, h0) * (m.coeff * mf);
      Surd val;
      if (a.step == 0) {
        val = base * Rational(w0);
      } else {
        if (hs >= 0) throw DivergenceError("kernel '" + kernel.name + "' diverges on " + a.str());
        Surd rho = sqrt_pow(p, hs);
        Surd one{1, 0, p};
        Surd inv = (one - rho).inverse();
        val = base * (inv * Rational(w0) + rho * inv * inv * Rational(ws));
      }
      if (m.weight == LogWeight::None)
        atom_plain = atom_plain + val;
      else
        atom_logs = atom_logs + val;
    }
    plain = plain + atom_plain;
    logs = logs + atom_logs;
    Rational cell = rpow(p, -a.n0) * mf;
    std::string measure = a.step == 0 ? to_string(cell)
                                      : (a.step > 0 ? to_string(cell / (Rational(1) - rpow(p, -a.step)))
                                                    : std::string("inf"));
    std::string ks;
    for (const Monomial& m : ts) {
      if (!ks.empty()) ks += " + ";
      ks += to_string(m.coeff) + "*|y|'^(" + std::to_string(m.alpha2) + "/2)|1-y|^(" +
            std::to_string(m.beta2) + "/2)";
      if (m.delta2) ks += "|y|^(" + std::to_string(m.delta2) + "/2)";
      if (m.weight != LogWeight::None) ks += "*log";
    }
    if (ks.empty()) ks = "0";
    std::string contrib = atom_plain.str();
    if (!atom_logs.is_zero()) contrib += " + (" + atom_logs.str() + ")*log(" + std::to_string(p) + ")";
    out.ledger.push_back({a.str(), measure, ks, contrib});
  }
  if (plain.b != 0 || logs.b != 0) throw DomainError("integral is not in Q + Q log p (sqrt p survives)");
  out.value = LogNumber(plain.a) + LogNumber::log(p, logs.a);
  return out;
}

LogNumber integrate(const ShellRegion& r, const KernelSpec& kernel) {
  return integrate_ledger(r, kernel).value;
}

LogNumber tr_xi0_nonarch(Prime p, const ThetaHatProvider& th) {
  ShellRegion y1 = ShellRegion::partition(p).filter(Predicate::Y(1));
  LogNumber v = integrate(y1, th.scaled(-1, -2));
  return v * Rational(BigInt(2 * p), BigInt(p - 1));
}

LogNumber eps_integral(Prime p, const ThetaHatProvider& th, int eps) {
  if (eps != 0 && eps != -1) throw ContractError("eps must be 0 or -1");
  ShellRegion y = ShellRegion::partition(p).filter(Predicate::Y(eps));
  return integrate(y, th.scaled(-1, -2));
}

LogNumber log_integral_Y1(Prime p, const ThetaHatProvider& th) {
  ShellRegion y1 = ShellRegion::partition(p).filter(Predicate::Y(1));
  return integrate(y1, th.scaled(-1, -2, LogWeight::LogRatio));
}

}  // namespace tc
