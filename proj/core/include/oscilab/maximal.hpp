#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "oscilab/sampled.hpp"

namespace oscilab {

enum class MaximalAlgorithm { brute, fast };

/// Options for the uncentered maximal operator M_r / M_delta.
struct MaximalOptions {
  double r = 1.0;                       // power in (0, 1]; r = 1 is plain M
  std::optional<double> delta_trunc{};  // cap on interval length (M_delta)
  MaximalAlgorithm algorithm = MaximalAlgorithm::fast;
  int candidate_density = 0;  // extra log-spaced endpoints per decade around
                              // the grid's grading point (0 = nodes only)
  bool polish = false;        // golden-section refinement in maximal_at
};

/// sup over intervals [a,b] containing x of (avg over [a,b] of |f|^r)^(1/r).
/// |f|^r is the piecewise-linear interpolant of the node values |f_i|^r.
/// Candidate endpoints are grid nodes plus the density refinement; the
/// degenerate candidate |f(x)| is always included.
double maximal_at(const SampledFunction& f, double x, const MaximalOptions& opts);

/// Whole-grid maximal function. `brute` enumerates every candidate pair per
/// node; `fast` shares the enumeration with suffix maxima of prefix-sum
/// averages (O(K^2) total). Both take the max of the identical candidate set,
/// so they agree exactly.
SampledFunction maximal_function(const SampledFunction& f, const MaximalOptions& opts);

/// Even step-plateau profile: height s^-delta above the background C on
/// [-s, s], linear ramps of width eps, mollified corners.
struct StepPlateauParams {
  double s = 1e-3;        // plateau half-width
  double delta_exp = 0.5; // height exponent (height = s^-delta_exp)
  double eps = 1e-5;      // ramp width
  double C = 2.0;         // background constant, > 1
  double height() const;  // s^-delta_exp
  double bump_mass() const;  // height * (2s + eps), the profile minus C
};

/// Exact maximal function of the (unmollified) step-plateau profile at
/// |x| > s + eps: the optimal interval reaches across the bump and ends on
/// the far ramp; closed form of that optimum.
double analytic_maximal_step(const StepPlateauParams& p, double x);

/// eta(x) = 2(x-s) / (x + sqrt(x^2 + 2 eps (x-s))); eta(s) = 0 and
/// eta -> 1 as x -> infinity.
double step_eta(const StepPlateauParams& p, double x);

/// Far-field closed form (A + h (1 - eta/2) eta eps) / (x + eta eps) + C with
/// A the bump mass. Agrees with the exact form up to a relative O(s/x) term,
/// so it is a cross-check for x >> s only.
double step_maximal_far_field(const StepPlateauParams& p, double x);

/// Least-squares fit of ln sup_t |grad M_r f_t| against ln |x| over nodes with
/// |x| in [fit_lo, fit_hi]. Gradients are central finite differences.
struct GradientDecayFit {
  double slope = 0.0;
  double ci_halfwidth = 0.0;  // 95% confidence half-width
  std::size_t points = 0;
  bool degenerate = false;  // all gradients numerically zero
};

GradientDecayFit gradient_decay_estimate(const std::vector<SampledFunction>& family,
                                         const MaximalOptions& opts, double fit_lo,
                                         double fit_hi);

/// Central finite differences of f on its grid (one-sided at the ends).
std::vector<double> central_differences(const SampledFunction& f);

}  // namespace oscilab
