#pragma once

#include <map>
#include <string>
#include <vector>

#include "oscilab/maximal.hpp"
#include "oscilab/sampled.hpp"

namespace oscilab {

/// Resolution request for family grids.
struct GridHint {
  double hull = 4.0;        // half-width of the build domain, in grid units
  int per_decade = 48;      // geometric density away from features
  int plateau_cells = 64;   // minimum cells across a plateau
  std::size_t max_nodes = 60000;
};

/// A generated family member. Physical coordinates are
/// x_phys = exp(log_scale) * x_grid; log_scale = 0 for absolute builds and
/// ln(s) in scaled-unit mode (used when the analytic plateau half-width falls
/// below the grid floor). `notes` records derived parameters and clamps.
struct FamilyBuild {
  SampledFunction f;
  double log_scale = 0.0;
  std::map<std::string, double> notes;
};

/// Even step plateau: height s^-delta above C on [-s, s], affine
/// ramps of width eps, corners mollified with `mollify_width`.
FamilyBuild step_plateau(const StepPlateauParams& p, double mollify_width,
                         const GridHint& hint = {});

/// Scaled-unit step plateau: plateau [-1, 1], height exp(delta_exp*neg_log_s)
/// above C, ramps eps_hat; log_scale = -neg_log_s.
FamilyBuild step_plateau_scaled(double neg_log_s, double delta_exp, double eps_hat, double C,
                                double mollify_width_hat, const GridHint& hint = {});

/// Spike + plateau + tail family: s = exp(-1/t), delta = sqrt(t); f equals
/// s^-delta on [-s, s], t^-ell on [-t, t] and |x|^-ell outside, mollified.
/// The spike half-width is clamped to the grid floor when unresolvable.
FamilyBuild tail_family(double t, double ell, const GridHint& hint = {});

/// Gradient-bounded family: plateau s^-delta on [-s, s], profile
/// s^-delta - s^(1-ell) + |x|^(1-ell) on (s, b], b solving
/// s^-delta - s^-ell + b^-ell = 0, background C. The b-equation and the
/// profile use exponents differing by one, so the profile jumps at b; the
/// jump is mollified and reported in notes["continuity_gap_at_b"].
FamilyBuild gradient_bounded(double s, double delta_exp, double ell, double C,
                             const GridHint& hint = {});

/// Cascade of plateaus a_i^-beta on I_i = [a_i, a_i + a_i^gamma_i] with
/// a_i = 2^(-2^i) over the background x^-alpha on (0, 1]. Plateau widths are
/// clamped to the resolvable floor when needed (notes["clamped_i"] = 1).
FamilyBuild plateau_cascade(double alpha, double beta, const std::vector<double>& gamma_seq,
                            int levels, const GridHint& hint = {});

/// Local frame of cascade plateau i: xi = (x - a_i) / |I_i|, plateau [0, 1].
/// Exact in the frame; the background carries its true variation whenever
/// |I_i|/a_i is representable.
struct CascadeFrame {
  SampledFunction f;
  double ln_interval;    // |ln |I_i|| = gamma_i 2^i ln 2
  double ln_a;           // |ln a_i| = 2^i ln 2
  double plateau_height; // a_i^-beta
  double background;     // a_i^-alpha
};
CascadeFrame cascade_local_frame(double alpha, double beta, double gamma_i, int level,
                                 const GridHint& hint = {});

/// Algebraic/polynomial blow-up profile
/// f_t(x) = cutoff(x) / (|x|^eps1 + (T-t)^eps2), cutoff == 1 on [-1/2, 1/2],
/// supported in (-1, 1).
FamilyBuild time_blowup(double eps1, double eps2, double T, double t,
                        const GridHint& hint = {});

/// Kind-dispatched family description; parameter keys use the generator
/// symbol names (s, delta, eps, C, t, ell, alpha, beta, N, gamma_step,
/// eps1, eps2, T, time, mollify_width). Missing keys take builder defaults.
struct FamilySpec {
  std::string kind;  // step_plateau | tail | gradient_bounded | plateau_cascade | time_blowup
  std::map<std::string, double> params;
  GridHint grid;
};

FamilyBuild build_family(const FamilySpec& spec);

}  // namespace oscilab
