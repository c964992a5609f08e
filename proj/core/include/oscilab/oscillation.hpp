#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "oscilab/sampled.hpp"
#include "oscilab/weights.hpp"

namespace oscilab {

/// Average of |f - f_Q| over Q.
double mean_oscillation(const SampledFunction& f, const Interval& q);

/// Two-level supremum search: a log-spaced lattice of interval lengths
/// (density per decade, from the smallest resolvable 4-cell interval up to
/// delta) crossed with positions, then golden-section polish in length and
/// position around the lattice argmax.
struct SearchParams {
  int density = 16;    // lengths and positions per decade
  bool polish = true;
  // Optional restriction of the sup search to [sup_lo, sup_hi] (the L1 part
  // always integrates over the full hull).
  double sup_lo = -std::numeric_limits<double>::infinity();
  double sup_hi = std::numeric_limits<double>::infinity();
};

struct OscillationReport {
  double l1_part = 0.0;
  double sup_part = 0.0;
  double norm_value = 0.0;  // l1_part + sup_part
  double argmax_a = 0.0;
  double argmax_b = 0.0;
  double delta = 0.0;  // the |Q| < delta cutoff used
  std::vector<std::pair<double, double>> per_scale;  // (length, weighted max osc)
};

/// Weight in the denominator of the sup part, given ln of the physical
/// interval length (log domain keeps lengths like e^{-100} * L usable).
using LengthWeight = std::function<double(double /*ln_len*/)>;

/// User-supplied tabulated weight: (length, phi) samples, interpolated
/// linearly in (ln length, ln phi) and clamped at the table ends.
LengthWeight make_tabulated_weight(std::vector<double> lengths, std::vector<double> phis);

/// || f ||_{bmo_phi} = ||f||_{L1} + sup_{|Q|<delta} (1/phi(|Q|)) avg_Q |f - f_Q|.
/// Physical length of a grid interval of length L is exp(log_scale) * L.
OscillationReport weighted_bmo_norm(const SampledFunction& f, const LengthWeight& phi_of_len,
                                    double delta, const SearchParams& sp,
                                    double log_scale = 0.0);

/// Convenience overload for the iterated-log weight.
OscillationReport weighted_bmo_norm(const SampledFunction& f, const LogWeight& w, double delta,
                                    const SearchParams& sp, double log_scale = 0.0);

/// Independent direct implementation of the unweighted local bmo norm
/// (phi == 1); reference for the k = 0 reduction.
OscillationReport unweighted_bmo_norm(const SampledFunction& f, double delta,
                                      const SearchParams& sp);

/// ||fg||_bmo / ( ||f||_{bmo_phi} * (||g||_inf + sup-part of g in bmo_{1/phi_star}) ).
/// The middle-factor weight is the reciprocal of phi_star (the subscript
/// (phi_star)^{-1} read as reciprocal; the functional-inverse reading is
/// flagged in reports, not used).
struct MultiplierRatio {
  double ratio = 0.0;
  double fg_norm = 0.0;
  double f_norm = 0.0;
  double g_inf = 0.0;
  double g_sup_part = 0.0;  // sup part under the reciprocal phi_star weight
};

MultiplierRatio multiplier_inequality_ratio(const SampledFunction& f, const SampledFunction& g,
                                            const LogWeight& w, double delta,
                                            const SearchParams& sp);

/// Derivative <-> oscillation bridge checks.
/// Forward: given |x f'(x)| <= c phi(x) on the grid, reports
///   sup_I avg_I |f - f_I| / phi(|I|) over the interval lattice.
/// Converse (f positive, decreasing, convex on (0,1)): reports
///   sup_x |x f'(x)| / phi(x) and sup_x psi(x) / phi(4x) with psi = |x f'|.
struct DerivativeCheckReport {
  bool even_ok = false;          // f even on the symmetric hull
  bool envelope_ok = false;      // |f'(x)| <= c |f'(y)| for |x| >= |y|
  bool monotone_convex_ok = false;  // f decreasing and convex on (0,1)
  double forward_hypothesis_c = 0.0;  // max |x f'| / phi(|x|)
  double forward_constant = 0.0;      // max_I mean_osc / phi(|I|)
  double converse_derivative_c = 0.0; // max |x f'| / phi(x)
  double converse_lower_c = 0.0;      // max psi(x) / phi(4x)
};

DerivativeCheckReport derivative_oscillation_check(const SampledFunction& f,
                                                   const std::vector<double>& fprime,
                                                   const LogWeight& w, double max_len,
                                                   const SearchParams& sp);

}  // namespace oscilab
