#include "oscilab/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace oscilab {

double iterated_exp(int k, double x) {
  if (k < 0) throw std::invalid_argument("iterated_exp: k must be >= 0");
  double v = x;
  for (int i = 0; i < k; ++i) {
    v = std::exp(v);
    if (!std::isfinite(v)) throw std::overflow_error("iterated_exp: overflow");
  }
  return v;
}

LogWeight::LogWeight(int k) : k_(k) {
  if (k < 0) throw std::invalid_argument("LogWeight: k must be >= 0");
  // Largest x keeping every iterated log positive; below it phi_star is
  // finite and decreasing and phi positive. For k >= 1 this is
  // exp(-exp^(k-1)(1)), for k = 0 we keep the conventional exp(-1).
  u_safe_ = (k_ == 0) ? 1.0 : iterated_exp(k_ - 1, 1.0);
  x_safe_ = std::exp(-u_safe_) * (1.0 - 1e-9);
  u_safe_ *= 1.0 + 1e-9;
}

namespace {

double iterated_log(int k, double u) {  // ln^(k)(u), throws if any stage dies
  double v = u;
  for (int i = 0; i < k; ++i) {
    if (v <= 0.0) throw std::domain_error("LogWeight: iterated log of a nonpositive value");
    v = std::log(v);
  }
  return v;
}

}  // namespace

double LogWeight::phi_star_from_neglog(double u) const {
  if (!(u > 0.0)) throw std::domain_error("LogWeight: u = |ln x| must be positive");
  return iterated_log(k_, u);
}

double LogWeight::phi_from_neglog(double u) const {
  if (!(u > 0.0)) throw std::domain_error("LogWeight: u = |ln x| must be positive");
  double prod = 1.0;
  double v = u;
  for (int j = 0; j < k_; ++j) {
    if (v <= 0.0) throw std::domain_error("LogWeight: phi undefined (iterated log nonpositive)");
    prod *= v;
    v = std::log(v);
  }
  return 1.0 / prod;
}

double LogWeight::phi_star(double x) const {
  if (!(x > 0.0) || !(x < x_safe_)) throw std::domain_error("phi_star: x outside (0, x_safe)");
  return phi_star_from_neglog(std::abs(std::log(x)));
}

double LogWeight::phi(double x) const {
  if (!(x > 0.0) || !(x < x_safe_)) throw std::domain_error("phi: x outside (0, x_safe)");
  return phi_from_neglog(std::abs(std::log(x)));
}

double LogWeight::compose_domain_floor() const {
  // need ln^(k)(u) finite: u > exp^(k-2)(1) for k >= 2, else u > 0
  return k_ >= 2 ? iterated_exp(k_ - 2, 1.0) : 0.0;
}

double LogWeight::compose(double y, double u_floor) const {
  if (!(y > 0.0)) throw std::domain_error("compose: y must be positive");
  double u = std::abs(std::log(y));
  const double dom = compose_domain_floor();
  if (k_ >= 2 && u <= dom)
    throw std::domain_error("compose: |ln y| below the depth-k definedness floor");
  if (u < u_floor && k_ >= 1) u = u_floor;  // saturates the |ln y| -> 0 spike
  return iterated_log(k_, u);
}

namespace {

// adaptive Simpson on [a, b] with absolute tolerance spread over the range
double adaptive_simpson(const std::function<double(double)>& g, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = g(lm), frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double phi_star_from_integral(const std::function<double(double)>& phi_fn, double t,
                              double delta) {
  if (!(t > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("phi_star_from_integral: t and delta must be positive");
  if (t >= delta) return 0.0;
  // u = ln(1/s): integral of phi(e^{-u}) du over [ln(1/delta), ln(1/t)]
  const double ua = std::log(1.0 / delta);
  const double ub = std::log(1.0 / t);
  auto g = [&phi_fn](double u) { return phi_fn(std::exp(-u)); };
  const double fa = g(ua), fb = g(ub), fm = g(0.5 * (ua + ub));
  if (!(fa > 0.0) || !(fb > 0.0) || !(fm > 0.0))
    throw std::domain_error("phi_star_from_integral: phi must be positive on the range");
  const double whole = (ub - ua) / 6.0 * (fa + 4.0 * fm + fb);
  const double tol = 1e-9 * std::max(std::abs(whole), 1e-30);
  return adaptive_simpson(g, ua, ub, fa, fm, fb, whole, tol, 40);
}

}  // namespace oscilab
