#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tracecheck/exactnum.hpp"

namespace tc {

// Atoms are sets y = anchor + p^n (c + p^k Z_p) with c a unit mod p^k; k = 0
// means the whole anchor + p^n Z_p^x. A tail repeats the cell at
// n = n0 + j*step for j >= 0.
enum class Anchor { Zero, One };

struct Atom {
  Anchor anchor = Anchor::Zero;
  long n0 = 0;
  long step = 0;  // 0 for a single cell
  std::uint64_t residue = 1;
  int k = 0;
  std::string str() const;
};

struct Affine {
  bool known = false;
  long c0 = 0;
  long slope = 0;
  long at(long j) const { return c0 + slope * j; }
};

// Invariants of y that are constant (or affine in j) over an atom.
struct CellProfile {
  Affine n;     // cell index
  Affine vy;    // v_p(y)
  Affine v1my;  // v_p(1 - y)
  Affine E;     // |y|' = p^{-E}
  bool omega_known = false;
  int omega = 0;
};

struct Constraint {
  enum Field { VY, V1MY, E } field;
  enum Op { LE, GE, EQ, EVEN, ODD } op;
  long value = 0;
};

struct Predicate {
  std::vector<Constraint> all;
  std::optional<std::set<int>> omegas;

  static Predicate Y(int eps);
  // Support of the spherical Theta-hat: v(1-y) even and at most 2 v_p(2).
  static Predicate theta_hat_support(Prime p);
  static Predicate valuation(Constraint::Op op, long value);
  Predicate operator&&(const Predicate& o) const;
  bool holds(const CellProfile& prof, long j) const;
};

class ShellRegion {
 public:
  explicit ShellRegion(Prime p);

  // Partition of Q_p^x into atoms on which v(y), v(1-y), |y|' and omega are
  // all determined.
  static ShellRegion partition(Prime p);

  void add_cell(Anchor anchor, long n, std::uint64_t residue, int k);
  // Tails must move away from 0 in steps of even length, and anchor-1 tails
  // must start deep enough that the residue of y stabilizes.
  void add_tail(Anchor anchor, long n0, long step, std::uint64_t residue, int k);

  // Keeps the points satisfying `pred`; tails are peeled cell by cell until
  // every constraint is provably constant on the remainder.
  ShellRegion filter(const Predicate& pred) const;
  ShellRegion united(const ShellRegion& o) const;

  Prime p() const { return p_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  CellProfile profile(const Atom& a) const;

 private:
  Prime p_;
  std::vector<Atom> atoms_;
};

enum class LogWeight {
  None,
  LogRatio,  // log(|1-y| / |y|')
  LogAbsY,   // log |y|
  LogAbs1mY, // log |1-y|
  LogP,      // the constant log p
};

// coeff * |y|'^{alpha2/2} * |1-y|^{beta2/2} * |y|^{delta2/2} * weight
struct Monomial {
  Rational coeff;
  int alpha2 = 0;
  int beta2 = 0;
  int delta2 = 0;
  LogWeight weight = LogWeight::None;
  bool operator==(const Monomial& o) const = default;
};

using KernelFn = std::function<std::vector<Monomial>(const CellProfile&)>;

struct KernelSpec {
  std::string name;
  KernelFn terms;
  std::optional<Predicate> support;

  static KernelSpec monomial(Monomial m, std::string name = "monomial");
  // Multiplies every term by |y|'^{alpha2/2} |1-y|^{beta2/2} and sets a weight.
  KernelSpec scaled(int alpha2, int beta2, LogWeight w = LogWeight::None) const;
};

struct LedgerEntry {
  std::string atom;
  std::string measure;
  std::string kernel;
  std::string contribution;
};

struct Integral {
  LogNumber value;
  std::vector<LedgerEntry> ledger;
};

Rational region_measure(const ShellRegion& r);
Integral integrate_ledger(const ShellRegion& r, const KernelSpec& kernel);
LogNumber integrate(const ShellRegion& r, const KernelSpec& kernel);

// A Theta-hat provider is a kernel with declared support.
using ThetaHatProvider = KernelSpec;

LogNumber tr_xi0_nonarch(Prime p, const ThetaHatProvider& th);
LogNumber eps_integral(Prime p, const ThetaHatProvider& th, int eps);
LogNumber log_integral_Y1(Prime p, const ThetaHatProvider& th);

}  // namespace tc
