#include "oscilab/families.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oscilab {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::vector<double> uniform_cells(double x0, double x1, int cells) {
  std::vector<double> v(cells + 1);
  for (int i = 0; i <= cells; ++i)
    v[i] = x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(cells);
  v.back() = x1;
  return v;
}

std::vector<double> geom_pack(double x0, double x1, int per_decade) {
  const int steps =
      std::max(2, static_cast<int>(std::ceil(std::log10(x1 / x0) * per_decade)));
  std::vector<double> v(steps + 1);
  const double ratio = std::pow(x1 / x0, 1.0 / steps);
  for (int i = 0; i <= steps; ++i) v[i] = x0 * std::pow(ratio, i);
  v.back() = x1;
  return v;
}

std::vector<double> mirrored(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = -v[v.size() - 1 - i];
  return out;
}

// snap the mollification width to eps / 2^m (m >= 3) so that ramp corners fall
// exactly on the uniform band lattice of cell w/4
double snap_width(double eps, double requested) {
  require(requested > 0.0, "mollify width must be positive");
  int m = 3;
  while (eps / std::pow(2.0, m) > requested && m < 40) ++m;
  return eps / std::pow(2.0, m);
}

// copies the positive side onto the negative one when the grid is exactly
// index-symmetric about a zero node, making evenness bit-exact
void symmetrize_even(const Grid1D& grid, std::vector<double>& vals) {
  const auto& xs = grid.nodes();
  const std::size_t zero = static_cast<std::size_t>(
      std::lower_bound(xs.begin(), xs.end(), 0.0) - xs.begin());
  if (zero >= xs.size() || xs[zero] != 0.0) return;
  if (2 * zero + 1 != xs.size()) return;
  for (std::size_t i = 0; i < zero; ++i)
    if (xs[i] != -xs[2 * zero - i]) return;
  for (std::size_t i = 0; i < zero; ++i) vals[i] = vals[2 * zero - i];
}

// Even trapezoid bump of height H over background C: plateau [-s, s], affine
// ramps of width eps. Shared by the absolute and the scaled-unit builder.
FamilyBuild build_step(double s, double H, double eps, double C, double w_req, double hull,
                       double log_scale, const GridHint& hint) {
  require(eps > 0.0 && eps <= s / 10.0, "step family: need 0 < eps <= s/10");
  require(C > 1.0, "step family: background C must exceed 1");
  require(w_req < eps / 4.0, "step family: mollify width must be < eps/4");
  require(hull > 2.0 * (s + eps), "step family: hull too small for the profile");

  const double w = snap_width(eps, w_req);
  const double cell = 0.25 * w;
  const int band_cells = static_cast<int>(std::lround((16.0 * w + eps) / cell));

  const std::vector<double> band =
      uniform_cells(s - 8.0 * w, s + eps + 8.0 * w, band_cells);
  const std::vector<double> inner = uniform_cells(0.0, s - 8.0 * w, 24);
  const std::vector<double> outer = geom_pack(s + eps + 8.0 * w, hull, hint.per_decade);
  Grid1D grid = merge_grids(
      {mirrored(inner), mirrored(band), mirrored(outer), inner, band, outer}, 0.0);
  require(grid.size() <= hint.max_nodes, "step family: node budget exceeded");

  auto profile = [&](double x) {
    const double ax = std::abs(x);
    if (ax <= s) return C + H;
    if (ax >= s + eps) return C;
    return C + H * (s + eps - ax) / eps;
  };
  SampledFunction raw = sample(grid, profile);
  SampledFunction smooth = mollify(raw, w);

  std::vector<double> vals = smooth.values();
  symmetrize_even(grid, vals);

  FamilyBuild out{SampledFunction(grid, std::move(vals)), log_scale, {}};
  out.notes["s"] = s;
  out.notes["eps"] = eps;
  out.notes["height"] = H;
  out.notes["C"] = C;
  out.notes["mollify_width"] = w;
  out.notes["bump_mass"] = H * (2.0 * s + eps);
  return out;
}

}  // namespace

FamilyBuild step_plateau(const StepPlateauParams& p, double mollify_width,
                         const GridHint& hint) {
  require(p.s > 0.0, "step_plateau: s must be positive");
  FamilyBuild out =
      build_step(p.s, p.height(), p.eps, p.C, mollify_width, hint.hull, 0.0, hint);
  out.notes["delta_exp"] = p.delta_exp;
  return out;
}

FamilyBuild step_plateau_scaled(double neg_log_s, double delta_exp, double eps_hat, double C,
                                double mollify_width_hat, const GridHint& hint) {
  require(neg_log_s > 0.0, "step_plateau_scaled: neg_log_s must be positive");
  const double H = std::exp(delta_exp * neg_log_s);
  require(std::isfinite(H), "step_plateau_scaled: height overflows");
  FamilyBuild out =
      build_step(1.0, H, eps_hat, C, mollify_width_hat, hint.hull, -neg_log_s, hint);
  out.notes["neg_log_s"] = neg_log_s;
  out.notes["delta_exp"] = delta_exp;
  return out;
}

FamilyBuild tail_family(double t, double ell, const GridHint& hint) {
  require(t > 0.0 && t < 1.0, "tail_family: t must be in (0,1)");
  require(ell > 0.0, "tail_family: ell must be positive");
  const double neg_log_s = 1.0 / t;
  const double delta = std::sqrt(t);
  const double H = std::exp(delta * neg_log_s);  // s^-delta = e^{1/sqrt(t)}
  const double s_analytic = neg_log_s > 700.0 ? 0.0 : std::exp(-neg_log_s);

  const double hull = std::max(hint.hull, 4.0 * t);
  const double floor_s = hull * 1e-25;
  const double s = std::max(s_analytic, floor_s);
  const bool clamped = s_analytic < floor_s;
  require(t > 2.0 * s, "tail_family: spike wider than the t-plateau");

  const double eps = s / 10.0;
  const double w = snap_width(eps, eps / 8.0);
  const double cell = 0.25 * w;
  const int band_cells = static_cast<int>(std::lround((16.0 * w + eps) / cell));

  const std::vector<double> band =
      uniform_cells(s - 8.0 * w, s + eps + 8.0 * w, band_cells);
  const std::vector<double> inner = uniform_cells(0.0, s - 8.0 * w, 24);
  const std::vector<double> outer = geom_pack(s + eps + 8.0 * w, hull, hint.per_decade);
  Grid1D grid = merge_grids({mirrored(inner), mirrored(band), mirrored(outer),
                             {-t, t}, inner, band, outer},
                            0.0);
  require(grid.size() <= hint.max_nodes, "tail_family: node budget exceeded");

  auto profile = [&](double x) {
    const double ax = std::abs(x);
    double v = (ax <= t) ? std::pow(t, -ell) : std::pow(ax, -ell);
    if (ax <= s)
      v += H;
    else if (ax < s + eps)
      v += H * (s + eps - ax) / eps;
    return v;
  };
  SampledFunction smooth = mollify(sample(grid, profile), w);
  std::vector<double> vals = smooth.values();
  symmetrize_even(grid, vals);

  FamilyBuild out{SampledFunction(grid, std::move(vals)), 0.0, {}};
  out.notes["t"] = t;
  out.notes["ell"] = ell;
  out.notes["delta"] = delta;
  out.notes["neg_log_s"] = neg_log_s;
  out.notes["s_effective"] = s;
  out.notes["clamped_s"] = clamped ? 1.0 : 0.0;
  out.notes["height"] = H;
  // dominance of the spike average over the t-plateau: t^ell e^{1/sqrt(t)}
  out.notes["ln_dominance"] = ell * std::log(t) + 1.0 / std::sqrt(t);
  return out;
}

FamilyBuild gradient_bounded(double s, double delta_exp, double ell, double C,
                             const GridHint& hint) {
  require(s > 0.0 && s < 1.0, "gradient_bounded: s must be in (0,1)");
  require(ell > 1.0, "gradient_bounded: ell must exceed 1");
  require(C > 1.0, "gradient_bounded: C must exceed 1");
  const double plateau = std::pow(s, -delta_exp);
  const double s_ml = std::pow(s, -ell);
  require(s_ml > plateau, "gradient_bounded: no root b (need s^-ell > s^-delta)");
  const double b = std::pow(s_ml - plateau, -1.0 / ell);
  require(b > s, "gradient_bounded: no root b > s");

  const double d = b - s;
  const double w = snap_width(d, d / 8.0);
  const double cell = 0.25 * w;
  const int band_cells = static_cast<int>(std::lround((16.0 * w + d) / cell));

  const double hull = std::max(hint.hull, 4.0 * b);
  const std::vector<double> band = uniform_cells(s - 8.0 * w, b + 8.0 * w, band_cells);
  const std::vector<double> inner = uniform_cells(0.0, s - 8.0 * w, 24);
  const std::vector<double> outer = geom_pack(b + 8.0 * w, hull, hint.per_decade);
  Grid1D grid = merge_grids(
      {mirrored(inner), mirrored(band), mirrored(outer), inner, band, outer}, 0.0);
  require(grid.size() <= hint.max_nodes, "gradient_bounded: node budget exceeded");

  const double s1l = std::pow(s, 1.0 - ell);
  auto profile = [&](double x) {
    const double ax = std::abs(x);
    if (ax <= s) return C + plateau;
    if (ax <= b) return C + plateau - s1l + std::pow(ax, 1.0 - ell);
    return C;
  };
  SampledFunction smooth = mollify(sample(grid, profile), w);
  std::vector<double> vals = smooth.values();
  symmetrize_even(grid, vals);
  SampledFunction f(grid, std::move(vals));

  FamilyBuild out{f, 0.0, {}};
  out.notes["s"] = s;
  out.notes["delta_exp"] = delta_exp;
  out.notes["ell"] = ell;
  out.notes["b"] = b;
  out.notes["b_root_residual"] = std::abs(plateau - s_ml + std::pow(b, -ell));
  out.notes["continuity_gap_at_b"] = plateau - s1l + std::pow(b, 1.0 - ell);
  out.notes["mollify_width"] = w;
  out.notes["l1_norm"] = integrate_abs(f, Interval(-hull, hull));
  // reported gradient envelope sup |f'(x)| |x|^ell over |x| >= s
  const auto diff = central_differences(f);
  const auto& xs = grid.nodes();
  double env = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double ax = std::abs(xs[i]);
    if (ax >= s) env = std::max(env, std::abs(diff[i]) * std::pow(ax, ell));
  }
  out.notes["grad_envelope_const"] = env;
  return out;
}

namespace {

double smoothstep01(double u) {  // C^1 ramp on [0,1]
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

}  // namespace

FamilyBuild plateau_cascade(double alpha, double beta, const std::vector<double>& gamma_seq,
                            int levels, const GridHint& hint) {
  require(alpha > 0.0 && alpha < beta, "plateau_cascade: need 0 < alpha < beta");
  require(alpha < 1.0, "plateau_cascade: alpha must be < 1 (n = 1)");
  require(levels >= 1 && levels <= 5, "plateau_cascade: levels in [1,5]");
  require(static_cast<int>(gamma_seq.size()) >= levels,
          "plateau_cascade: gamma_seq shorter than levels");
  // constant gamma is the degenerate control case; decreasing is rejected
  for (int i = 1; i < levels; ++i)
    require(gamma_seq[i] >= gamma_seq[i - 1], "plateau_cascade: gamma_seq must not decrease");

  struct Plateau {
    double a, width, eps, height;
    bool clamped;
  };
  std::vector<Plateau> ps;
  for (int i = 1; i <= levels; ++i) {
    const double la = std::pow(2.0, i) * std::log(2.0);  // |ln a_i|
    const double a = std::exp(-la);                      // a_i = 2^{-2^i}
    const double gamma = gamma_seq[i - 1];
    require(gamma > 1.0, "plateau_cascade: gamma_i must exceed 1");
    double width = std::exp(-gamma * la);
    const double floor_w = a * 1e-12;  // ~64 resolvable cells
    const bool clamped = width < floor_w;
    if (clamped) width = floor_w;
    ps.push_back({a, width, width / 10.0, std::exp(beta * la), clamped});
  }
  for (int i = 1; i < levels; ++i) {
    const double gap = ps[i - 1].a - (ps[i].a + ps[i].width);
    require(gap > 10.0 * ps[i].width, "plateau_cascade: overlapping plateaus");
  }

  const double floor_x = ps.back().a / 64.0;
  std::vector<std::vector<double>> packs;
  packs.push_back(geom_pack(floor_x, 1.0, hint.per_decade));
  for (const auto& p : ps) {
    const int cells = std::max(hint.plateau_cells, 40) + 40;
    packs.push_back(uniform_cells(p.a - 2.0 * p.eps, p.a + p.width + 2.0 * p.eps, cells));
  }
  Grid1D grid = merge_grids(packs, 0.0);
  require(grid.size() <= hint.max_nodes, "plateau_cascade: node budget exceeded");

  auto profile = [&](double x) {
    double v = std::pow(x, -alpha);
    for (const auto& p : ps) {
      if (x < p.a - p.eps || x > p.a + p.width + p.eps) continue;
      const double up = smoothstep01((x - (p.a - p.eps)) / p.eps);
      const double down = smoothstep01((p.a + p.width + p.eps - x) / p.eps);
      const double ramp = std::min(up, down);
      v = v + (p.height - v) * ramp;
    }
    return v;
  };
  FamilyBuild out{sample(grid, profile), 0.0, {}};
  out.notes["alpha"] = alpha;
  out.notes["beta"] = beta;
  for (int i = 0; i < levels; ++i) {
    const std::string tag = std::to_string(i + 1);
    out.notes["a_" + tag] = ps[i].a;
    out.notes["width_" + tag] = ps[i].width;
    out.notes["clamped_" + tag] = ps[i].clamped ? 1.0 : 0.0;
  }
  return out;
}

CascadeFrame cascade_local_frame(double alpha, double beta, double gamma_i, int level,
                                 const GridHint& hint) {
  require(alpha > 0.0 && alpha < beta, "cascade_local_frame: need 0 < alpha < beta");
  require(level >= 1 && level <= 6, "cascade_local_frame: level in [1,6]");
  require(gamma_i > 1.0, "cascade_local_frame: gamma_i must exceed 1");
  const double la = std::pow(2.0, level) * std::log(2.0);  // |ln a_i|
  const double ln_interval = gamma_i * la;
  const double w_rel_ln = -(gamma_i - 1.0) * la;  // ln(|I_i| / a_i)
  const double w_rel = w_rel_ln < -700.0 ? 0.0 : std::exp(w_rel_ln);
  const double height = std::exp(beta * la);
  const double bg0 = std::exp(alpha * la);
  require(std::isfinite(height), "cascade_local_frame: height overflows");

  // frame cannot reach below x = 0: xi > -1/w_rel
  const double reach = std::max(hint.hull, 8.0);
  double xi_min = -reach;
  if (w_rel > 0.0) xi_min = std::max(xi_min, -0.98 / w_rel);

  const double eps = 0.02;
  std::vector<std::vector<double>> packs;
  packs.push_back(uniform_cells(-0.3, 1.3, 640));
  if (xi_min < -0.3) {
    auto left = geom_pack(0.3, -xi_min, hint.per_decade);
    for (double& v : left) v = -v;
    std::reverse(left.begin(), left.end());
    packs.push_back(left);
  }
  packs.push_back(geom_pack(1.3, reach * 0.5 + 1.0, hint.per_decade));
  Grid1D grid = merge_grids(packs, 0.0);

  auto bg = [&](double xi) {
    if (w_rel == 0.0) return bg0;
    return std::exp(alpha * (la - std::log1p(std::max(xi * w_rel, -0.999))));
  };
  auto profile = [&](double xi) {
    double v = bg(xi);
    if (xi < -eps || xi > 1.0 + eps) return v;
    const double up = smoothstep01((xi + eps) / eps);
    const double down = smoothstep01((1.0 + eps - xi) / eps);
    return v + (height - v) * std::min(up, down);
  };
  CascadeFrame frame{sample(grid, profile), ln_interval, la, height, bg0};
  return frame;
}

FamilyBuild time_blowup(double eps1, double eps2, double T, double t, const GridHint& hint) {
  require(eps1 > 0.0 && eps2 > 0.0, "time_blowup: eps1 and eps2 must be positive");
  require(t > 0.0 && t < T, "time_blowup: need 0 < t < T");
  const double tau = T - t;

  std::vector<std::vector<double>> packs;
  const double hull = std::max(2.0, hint.hull / 2.0);
  const std::vector<double> side_log = geom_pack(1e-9, hull, hint.per_decade);
  const std::vector<double> patch = uniform_cells(0.45, 1.06, 122);
  packs.push_back(side_log);
  packs.push_back(patch);
  packs.push_back(mirrored(side_log));
  packs.push_back(mirrored(patch));
  packs.push_back({0.0});
  Grid1D grid = merge_grids(packs, 0.0);
  require(grid.size() <= hint.max_nodes, "time_blowup: node budget exceeded");

  auto cutoff = [](double x) {
    const double ax = std::abs(x);
    if (ax <= 0.5) return 1.0;
    if (ax >= 1.0) return 0.0;
    const double u = (ax - 0.5) / 0.5;
    const double g1 = std::exp(-1.0 / (1.0 - u));
    const double g0 = std::exp(-1.0 / u);
    return g1 / (g1 + g0);
  };
  const double shift = std::pow(tau, eps2);
  auto profile = [&](double x) {
    return cutoff(x) / (std::pow(std::abs(x), eps1) + shift);
  };
  FamilyBuild out{sample(grid, profile), 0.0, {}};
  out.notes["eps1"] = eps1;
  out.notes["eps2"] = eps2;
  out.notes["T_minus_t"] = tau;
  out.notes["peak"] = std::pow(tau, -eps2);
  out.notes["ell1_expected"] = eps1 + 1.0;
  out.notes["ell2_expected"] = eps2 * (1.0 + 1.0 / eps1);
  return out;
}


namespace {

double param_or(const FamilySpec& spec, const std::string& key, double fallback) {
  const auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : it->second;
}

}  // namespace

FamilyBuild build_family(const FamilySpec& spec) {
  if (spec.kind == "step_plateau") {
    StepPlateauParams p;
    p.s = param_or(spec, "s", 1e-3);
    p.delta_exp = param_or(spec, "delta", 0.5);
    p.eps = param_or(spec, "eps", p.s / 100.0);
    p.C = param_or(spec, "C", 2.0);
    return step_plateau(p, param_or(spec, "mollify_width", p.eps / 8.0), spec.grid);
  }
  if (spec.kind == "tail")
    return tail_family(param_or(spec, "t", 0.25), param_or(spec, "ell", 2.0), spec.grid);
  if (spec.kind == "gradient_bounded")
    return gradient_bounded(param_or(spec, "s", 1e-3), param_or(spec, "delta", 0.1),
                            param_or(spec, "ell", 2.0), param_or(spec, "C", 2.0), spec.grid);
  if (spec.kind == "plateau_cascade") {
    const int levels = static_cast<int>(param_or(spec, "N", 3.0));
    const double step = param_or(spec, "gamma_step", 2.0);
    std::vector<double> gamma;
    for (int i = 1; i <= levels; ++i) gamma.push_back(step * i);
    return plateau_cascade(param_or(spec, "alpha", 0.5), param_or(spec, "beta", 2.0), gamma,
                           levels, spec.grid);
  }
  if (spec.kind == "time_blowup")
    return time_blowup(param_or(spec, "eps1", 0.5), param_or(spec, "eps2", 0.5),
                       param_or(spec, "T", 1.0), param_or(spec, "time", 0.9), spec.grid);
  throw std::invalid_argument("build_family: unknown kind: " + spec.kind);
}

}  // namespace oscilab
