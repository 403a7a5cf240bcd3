#pragma once

#include <functional>
#include <map>
#include <string>

#include "tracecheck/exactnum.hpp"
#include "tracecheck/padic.hpp"
#include "tracecheck/shells.hpp"

namespace tc {

// amplitude * 1_{X_p^m}, times p^{-m/2} when `scaled`.
struct HeckeBall {
  long m = 0;
  bool scaled = false;
  Rational amplitude{1};

  // amplitude * p^{-m/2 if scaled}
  HalfPowRational factor(Prime p) const;
};

// theta_inf^{+-}(x) = theta_inf(x, +-1/4). Both vanish for |x| >= radius.
struct ArchProfile {
  std::string name;
  std::function<double(double)> plus;
  std::function<double(double)> minus;
  double radius = 0;
  std::string smoothness = "C-infinity";

  // theta+ = 1 on |x| <= R/2, theta- = 1 on |x| <= 1, both smoothly 0 at R.
  static ArchProfile plateau(double R = 4.0);
  static ArchProfile zero();
  static ArchProfile named(const std::string& name);
};

// 1 on |x| <= inner, 0 on |x| >= outer, C-infinity in between.
double plateau_bump(double x, double inner, double outer);

struct TestFunctionSpec {
  std::map<Prime, HeckeBall> finite;
  ArchProfile arch = ArchProfile::plateau();

  // Spherical data (m = 0, amplitude 1) at every prime of S.
  static TestFunctionSpec spherical(const PlaceSet& S, ArchProfile arch = ArchProfile::plateau());
  const HeckeBall& at(Prime q) const;
};

// scale * weight, both exact.
struct WeightedOrbital {
  HalfPowRational scale;
  LogNumber weight;
  // Throws DomainError when the scale carries an odd square root.
  LogNumber value() const;
  std::string str() const;
};

HalfPowRational orb_split(Prime p, const HeckeBall& f, const Rational& a, const Rational& b);
WeightedOrbital worb(Prime p, const HeckeBall& f, const Rational& a, const Rational& b);
WeightedOrbital worb_hat(Prime p, const HeckeBall& f, const Rational& a, const Rational& b);
// worb - 2 log(|a-b| / |ab|^{1/2}) orb
WeightedOrbital worb_tilde(Prime p, const HeckeBall& f, const Rational& a, const Rational& b);

// |N|^{-1/2} (1 - chi/p)^{-1} p^{-k} orb(f; T, N).
HalfPowRational theta_p(Prime p, const HeckeBall& f, const Rational& T, const Rational& N);

// Closed form of Theta-hat_p for m = 0.
Rational theta_hat_p(Prime p, const HeckeBall& f, const Rational& y);
// The same value from theta_p on the single shell v(z) = v(2) - v(1-y)/2.
Rational theta_hat_from_theta(Prime p, const HeckeBall& f, const Rational& y);
// Theta-hat_p as a shell kernel.
ThetaHatProvider spherical_theta_hat(Prime p, const HeckeBall& f = {});

LogNumber wtr_hat_hecke(Prime p, long m);
// Shell-engine value of the weighted trace for m = 0.
LogNumber wtilde_tr_zero(Prime p, const HeckeBall& f = {});
// 2p log p / ((p - 1)(p^2 - 1))
LogNumber wtilde_tr_zero_closed(Prime p);

// int_{Z_p} log|x| dx by the shell engine.
LogNumber unip_modified_local(Prime p);

struct SeriesFactor {
  LogNumber partial;        // (1 - 1/p)^2 sum_{m <= M} wtr_hat_hecke(p, m) p^{-m}
  LogNumber limit;          // exact value of the full series
  double tail_bound = 0;    // bound on |limit - partial| / log p
  Rational ratio;           // limit / (log p / (p^2 - 1))
};
SeriesFactor series_factor(Prime p, long M);

// theta_inf at diag(a, b) through Z_+ invariance.
double theta_inf(const ArchProfile& prof, double a, double b);
double theta_hat_inf(const ArchProfile& prof, double x);

struct Quadrature {
  double value = 0;
  double error = 0;
};
// 4 (int_{|x|>1} theta+/sqrt(x^2-1) + int theta-/sqrt(x^2+1)), singularities removed
// by x = +-cosh u and x = sinh u.
Quadrature tr_xi0_arch(const ArchProfile& prof, double tol = 1e-12);
// 2 int_0^inf Theta-hat(x) / (|1-x| sqrt x) dx in the original coordinate.
Quadrature tr_xi0_arch_direct(const ArchProfile& prof, double tol = 1e-12);
// int_{x<0} Theta-hat(x) / (|1-x| |x|^{1/2}) dx
Quadrature arch_negative_integral(const ArchProfile& prof, double tol = 1e-12);
// int_{x>0} log(|1-x|/|x|) Theta-hat(x) / (|1-x| |x|^{1/2}) dx
Quadrature arch_log_integral(const ArchProfile& prof, double tol = 1e-10);

}  // namespace tc
