#include "oscilab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "oscilab/parallel.hpp"

namespace oscilab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Candidate endpoints (all grid nodes plus optional log refinement around the
// grading point) with |f|^r values and prefix integrals of the interpolant.
struct Candidates {
  std::vector<double> x;
  std::vector<double> g;  // |f|^r at candidates (piecewise-linear in between)
  std::vector<double> P;  // P[i] = integral of g over [x[0], x[i]]
  std::vector<std::size_t> node_at;  // candidate index of each grid node

  double avg(std::size_t i, std::size_t j) const { return (P[j] - P[i]) / (x[j] - x[i]); }
};

Candidates build_candidates(const SampledFunction& f, const MaximalOptions& opts) {
  const auto& xs = f.grid().nodes();
  std::vector<double> extra;
  if (opts.candidate_density > 0) {
    const double c = f.grid().grading_point();
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    for (double xn : xs) {
      const double d = std::abs(xn - c);
      if (d > 0.0) dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
    if (dmin < dmax) {
      const int steps =
          static_cast<int>(std::ceil(std::log10(dmax / dmin) * opts.candidate_density));
      const double ratio = std::pow(dmax / dmin, 1.0 / std::max(steps, 1));
      for (int i = 1; i < steps; ++i) {
        const double d = dmin * std::pow(ratio, i);
        for (double cand : {c - d, c + d})
          if (cand > xs.front() && cand < xs.back()) extra.push_back(cand);
      }
    }
  }

  Candidates cs;
  cs.x.reserve(xs.size() + extra.size());
  std::sort(extra.begin(), extra.end());
  const double tol = 1e-13 * f.grid().span();
  std::size_t e = 0;
  for (double xn : xs) {
    while (e < extra.size() && extra[e] < xn - tol) {
      if (cs.x.empty() || extra[e] - cs.x.back() > tol) cs.x.push_back(extra[e]);
      ++e;
    }
    while (e < extra.size() && extra[e] <= xn + tol) ++e;  // drop near-duplicates
    cs.x.push_back(xn);
  }
  while (e < extra.size()) {
    if (extra[e] - cs.x.back() > tol) cs.x.push_back(extra[e]);
    ++e;
  }

  const bool plain = (opts.r == 1.0);
  auto g_of_node = [&](std::size_t i) {
    const double a = std::abs(f.values()[i]);
    return plain ? a : std::pow(a, opts.r);
  };

  cs.g.resize(cs.x.size());
  cs.node_at.resize(xs.size());
  std::size_t node = 0;
  for (std::size_t i = 0; i < cs.x.size(); ++i) {
    if (node < xs.size() && cs.x[i] == xs[node]) {
      cs.g[i] = g_of_node(node);
      cs.node_at[node] = i;
      ++node;
    } else {
      // interpolate |f|^r linearly between neighboring nodes
      const std::size_t cell = f.grid().cell_of(cs.x[i]);
      const double t = (cs.x[i] - xs[cell]) / (xs[cell + 1] - xs[cell]);
      cs.g[i] = g_of_node(cell) + t * (g_of_node(cell + 1) - g_of_node(cell));
    }
  }
  if (node != xs.size()) throw std::logic_error("build_candidates: node alignment failed");

  cs.P.resize(cs.x.size());
  cs.P[0] = 0.0;
  for (std::size_t i = 1; i < cs.x.size(); ++i)
    cs.P[i] = cs.P[i - 1] + 0.5 * (cs.g[i] + cs.g[i - 1]) * (cs.x[i] - cs.x[i - 1]);
  return cs;
}

double root_of_power(double v, double r) {
  if (r == 1.0) return v;
  return std::pow(v, 1.0 / r);
}

// continuous prefix integral of the candidate interpolant at xi in hull
double prefix_at(const Candidates& cs, double xi) {
  auto it = std::upper_bound(cs.x.begin(), cs.x.end(), xi);
  std::size_t i = (it == cs.x.begin()) ? 0 : static_cast<std::size_t>(it - cs.x.begin()) - 1;
  if (i + 1 >= cs.x.size()) i = cs.x.size() - 2;
  const double h = cs.x[i + 1] - cs.x[i];
  const double d = xi - cs.x[i];
  const double slope = (cs.g[i + 1] - cs.g[i]) / h;
  return cs.P[i] + cs.g[i] * d + 0.5 * slope * d * d;
}

double golden_max(const std::function<double(double)>& fn, double lo, double hi, int iters) {
  if (!(hi > lo)) return lo;
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = fn(d);
    }
  }
  return fc > fd ? c : d;
}

}  // namespace

double maximal_at(const SampledFunction& f, double x, const MaximalOptions& opts) {
  if (!(opts.r > 0.0 && opts.r <= 1.0)) throw std::invalid_argument("maximal_at: r in (0,1]");
  const auto& xs = f.grid().nodes();
  if (!(x >= xs.front() && x <= xs.back()))
    throw std::invalid_argument("maximal_at: x outside grid hull");
  if (opts.delta_trunc && !(*opts.delta_trunc > 0.0))
    throw std::invalid_argument("maximal_at: delta_trunc must be positive");

  const Candidates cs = build_candidates(f, opts);
  const double trunc = opts.delta_trunc.value_or(std::numeric_limits<double>::infinity());
  const std::size_t K = cs.x.size();

  // last candidate <= x and first >= x
  const std::size_t ib = static_cast<std::size_t>(
      std::lower_bound(cs.x.begin(), cs.x.end(), x) - cs.x.begin());
  const std::size_t ia = (ib < K && cs.x[ib] == x) ? ib : (ib == 0 ? 0 : ib - 1);

  // degenerate candidate: the interpolated point value
  const std::size_t cell = f.grid().cell_of(x);
  const double t = (x - xs[cell]) / (xs[cell + 1] - xs[cell]);
  const double ga = cs.g[cs.node_at[cell]], gb = cs.g[cs.node_at[cell + 1]];
  double best = ga + t * (gb - ga);
  std::size_t best_a = K, best_b = K;

  for (std::size_t a = 0; a <= ia; ++a) {
    if (x - cs.x[a] > trunc) continue;
    const std::size_t bmin = std::max(ib, a + 1);
    for (std::size_t b = bmin; b < K; ++b) {
      if (cs.x[b] - cs.x[a] > trunc) break;
      const double v = cs.avg(a, b);
      if (v > best) {
        best = v;
        best_a = a;
        best_b = b;
      }
    }
  }

  if (opts.polish && best_a < K) {
    double a0 = cs.x[best_a], b0 = cs.x[best_b];
    const double alo = best_a > 0 ? cs.x[best_a - 1] : cs.x.front();
    const double ahi = std::min(x, best_a + 1 < K ? cs.x[best_a + 1] : cs.x.back());
    const double blo = std::max(x, best_b > 0 ? cs.x[best_b - 1] : cs.x.front());
    const double bhi = best_b + 1 < K ? cs.x[best_b + 1] : cs.x.back();
    for (int round = 0; round < 2; ++round) {
      a0 = golden_max(
          [&](double aa) {
            if (b0 - aa > trunc || !(b0 > aa)) return kNegInf;
            return (prefix_at(cs, b0) - prefix_at(cs, aa)) / (b0 - aa);
          },
          std::max(alo, b0 - trunc), ahi, 60);
      b0 = golden_max(
          [&](double bb) {
            if (bb - a0 > trunc || !(bb > a0)) return kNegInf;
            return (prefix_at(cs, bb) - prefix_at(cs, a0)) / (bb - a0);
          },
          blo, std::min(bhi, a0 + trunc), 60);
    }
    if (b0 > a0 && b0 - a0 <= trunc)
      best = std::max(best, (prefix_at(cs, b0) - prefix_at(cs, a0)) / (b0 - a0));
  }

  return root_of_power(best, opts.r);
}

namespace {

void maximal_brute(const Candidates& cs, double trunc, std::vector<double>& out_g) {
  const std::size_t K = cs.x.size();
  const std::size_t n = out_g.size();
  // enumerate every admissible candidate pair per node; parallel over nodes
  parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t node = lo; node < hi; ++node) {
      const std::size_t ci = cs.node_at[node];
      double best = cs.g[ci];
      for (std::size_t a = 0; a <= ci; ++a) {
        if (cs.x[ci] - cs.x[a] > trunc) continue;
        const double xa = cs.x[a], Pa = cs.P[a];
        const std::size_t bmin = std::max(ci, a + 1);
        for (std::size_t b = bmin; b < K; ++b) {
          if (cs.x[b] - xa > trunc) break;
          const double v = (cs.P[b] - Pa) / (cs.x[b] - xa);
          if (v > best) best = v;
        }
      }
      out_g[node] = best;
    }
  });
}

void maximal_fast(const Candidates& cs, double trunc, std::vector<double>& out_g) {
  const std::size_t K = cs.x.size();
  const std::size_t n = out_g.size();
  std::vector<double> T(K, kNegInf);  // T[a] = max over admitted b >= j of avg(a,b)
  std::size_t node = n;  // walk nodes right-to-left alongside candidates
  std::size_t lo = K;
  for (std::size_t j = K; j-- > 0;) {
    // admissible a range [lo, j]: x[j] - x[a] <= trunc; widens as j moves left
    if (lo > j) lo = j;
    while (lo > 0 && cs.x[j] - cs.x[lo - 1] <= trunc) --lo;
    {
      const double xj = cs.x[j], Pj = cs.P[j];
      for (std::size_t a = lo; a < j; ++a) {
        const double v = (Pj - cs.P[a]) / (xj - cs.x[a]);
        if (v > T[a]) T[a] = v;
      }
    }
    if (node > 0 && cs.node_at[node - 1] == j) {
      --node;
      double best = cs.g[j];
      for (std::size_t a = lo; a <= j; ++a)
        if (T[a] > best) best = T[a];
      out_g[node] = best;
    }
  }
  if (node != 0) throw std::logic_error("maximal_fast: node walk failed");
}

}  // namespace

SampledFunction maximal_function(const SampledFunction& f, const MaximalOptions& opts) {
  if (!(opts.r > 0.0 && opts.r <= 1.0))
    throw std::invalid_argument("maximal_function: r in (0,1]");
  if (opts.delta_trunc && !(*opts.delta_trunc > 0.0))
    throw std::invalid_argument("maximal_function: delta_trunc must be positive");
  const Candidates cs = build_candidates(f, opts);
  const double trunc = opts.delta_trunc.value_or(std::numeric_limits<double>::infinity());
  std::vector<double> out(f.size());
  if (opts.algorithm == MaximalAlgorithm::brute)
    maximal_brute(cs, trunc, out);
  else
    maximal_fast(cs, trunc, out);
  if (opts.r != 1.0)
    for (double& v : out) v = std::pow(v, 1.0 / opts.r);
  return SampledFunction(f.grid(), std::move(out));
}

double StepPlateauParams::height() const { return std::pow(s, -delta_exp); }

double StepPlateauParams::bump_mass() const { return height() * (2.0 * s + eps); }

double analytic_maximal_step(const StepPlateauParams& p, double x) {
  const double ax = std::abs(x);
  if (!(ax > p.s + p.eps))
    throw std::domain_error("analytic_maximal_step: requires |x| > s + eps");
  // Optimal interval [a, x] ends inside the far ramp; with P = x + s + eps the
  // ramp offset solves tau^2/2 - tau P + eps(2s+eps) = 0 and the maximal
  // average equals the ramp value at the optimum.
  const double P = ax + p.s + p.eps;
  const double q = 2.0 * p.eps * (2.0 * p.s + p.eps);
  const double root = std::sqrt(P * P - q);
  return p.C + 2.0 * p.height() * (2.0 * p.s + p.eps) / (P + root);
}

double step_eta(const StepPlateauParams& p, double x) {
  const double ax = std::abs(x);
  if (!(ax >= p.s)) throw std::domain_error("step_eta: requires |x| >= s");
  return 2.0 * (ax - p.s) / (ax + std::sqrt(ax * ax + 2.0 * p.eps * (ax - p.s)));
}

double step_maximal_far_field(const StepPlateauParams& p, double x) {
  const double ax = std::abs(x);
  if (!(ax > p.s + p.eps))
    throw std::domain_error("step_maximal_far_field: requires |x| > s + eps");
  const double eta = step_eta(p, ax);
  const double h = p.height();
  return (p.bump_mass() + h * (1.0 - 0.5 * eta) * eta * p.eps) / (ax + eta * p.eps) + p.C;
}

std::vector<double> central_differences(const SampledFunction& f) {
  const auto& xs = f.grid().nodes();
  const auto& vs = f.values();
  const std::size_t n = f.size();
  std::vector<double> d(n);
  d[0] = (vs[1] - vs[0]) / (xs[1] - xs[0]);
  d[n - 1] = (vs[n - 1] - vs[n - 2]) / (xs[n - 1] - xs[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (vs[i + 1] - vs[i - 1]) / (xs[i + 1] - xs[i - 1]);
  return d;
}

GradientDecayFit gradient_decay_estimate(const std::vector<SampledFunction>& family,
                                         const MaximalOptions& opts, double fit_lo,
                                         double fit_hi) {
  if (family.empty()) throw std::invalid_argument("gradient_decay_estimate: empty family");
  if (!(fit_lo > 0.0 && fit_hi > fit_lo))
    throw std::invalid_argument("gradient_decay_estimate: bad fit window");

  const auto& grid = family.front().grid();
  std::vector<double> sup_grad(grid.size(), 0.0);
  double sup_val = 0.0;
  double val_variation = 0.0;
  for (const auto& f : family) {
    if (f.grid().nodes() != grid.nodes())
      throw std::invalid_argument("gradient_decay_estimate: family must share one grid");
    const SampledFunction M = maximal_function(f, opts);
    const auto d = central_differences(M);
    double lo = M.values()[0], hi = lo;
    for (std::size_t i = 0; i < d.size(); ++i) {
      sup_grad[i] = std::max(sup_grad[i], std::abs(d[i]));
      sup_val = std::max(sup_val, std::abs(M.values()[i]));
      lo = std::min(lo, M.values()[i]);
      hi = std::max(hi, M.values()[i]);
    }
    val_variation = std::max(val_variation, hi - lo);
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double ax = std::abs(grid.nodes()[i]);
    if (ax < fit_lo || ax > fit_hi) continue;
    if (sup_grad[i] > 0.0) {
      lx.push_back(std::log(ax));
      ly.push_back(std::log(sup_grad[i]));
    }
  }

  GradientDecayFit fit;
  fit.points = lx.size();
  const double decades = std::log10(fit_hi / fit_lo);
  if (static_cast<double>(lx.size()) < 16.0 * decades)
    throw std::invalid_argument("gradient_decay_estimate: grid too coarse (< 16 nodes/decade)");

  // a flat maximal function carries only prefix-sum rounding noise
  if (val_variation <= 1e-8 * std::max(sup_val, 1e-300)) {
    fit.degenerate = true;  // "degenerate: zero gradient"
    return fit;
  }

  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - my - fit.slope * (lx[i] - mx);
    rss += r * r;
  }
  const double se = std::sqrt(rss / std::max(n - 2.0, 1.0) / sxx);
  fit.ci_halfwidth = 1.96 * se;
  return fit;
}

}  // namespace oscilab
