#pragma once

#include <functional>

namespace oscilab {

/// k-fold composition exp(exp(...exp(x))); k = 0 is the identity.
double iterated_exp(int k, double x);

/// Iterated-logarithm weight pair: phi_star(x) = ln^(k)(|ln x|) and
/// phi(x) = -x * phi_star'(x) = 1 / (L_0 L_1 ... L_{k-1}) with L_0 = |ln x|,
/// L_{j+1} = ln L_j. k = 0 gives phi_star = |ln x|, phi = 1.
///
/// Evaluation is available in the log domain (u = |ln x|) so that lengths far
/// below the double range (x = e^{-100} * eps) stay usable via their logs.
class LogWeight {
 public:
  explicit LogWeight(int k);

  int depth() const { return k_; }

  /// Largest x with every iterated log positive: phi_star finite and strictly
  /// decreasing, phi positive, on (0, x_safe).
  double x_safe() const { return x_safe_; }
  /// |ln x_safe|: lower bound for the log-domain argument.
  double u_safe() const { return u_safe_; }

  double phi_star(double x) const;  // pre: 0 < x < x_safe
  double phi(double x) const;       // pre: 0 < x < x_safe

  /// phi_star as a function of u = |ln x|; pre: u > u_safe.
  double phi_star_from_neglog(double u) const;
  /// phi as a function of u = |ln x|; pre: u > u_safe.
  double phi_from_neglog(double u) const;

  /// phi_star(y) for the value side of compositions h = phi_star(M f).
  /// Accepts any y > 0 with ln^(k)(|ln y|) finite; |ln y| is floored at
  /// `u_floor` to keep mean-oscillation integrals finite when y crosses 1.
  double compose(double y, double u_floor = 1e-6) const;

  /// Smallest |ln y| for which compose() is finite (0 for k <= 1, 1 for k = 2,
  /// e for k = 3, ...). Backgrounds C must satisfy |ln C| > this.
  double compose_domain_floor() const;

 private:
  int k_;
  double x_safe_;
  double u_safe_;
};

/// Eq-style integral transform: phi_star(t) = \int_{min(delta,t)}^{delta}
/// phi(s)/s ds, computed after the substitution u = ln(1/s) (which removes
/// the 1/s singularity). Adaptive, relative error <= 1e-8. Returns 0 for
/// t >= delta.
double phi_star_from_integral(const std::function<double(double)>& phi_fn, double t,
                              double delta);

}  // namespace oscilab
