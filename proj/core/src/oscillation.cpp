#include "oscilab/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oscilab/parallel.hpp"

namespace oscilab {

double mean_oscillation(const SampledFunction& f, const Interval& q) {
  const double mean = average(f, q);
  return integrate_abs(f, q, mean) / q.length();
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SupDomain {
  double lo, hi;  // grid units
  double center;  // position-lattice focus
};

SupDomain sup_domain(const SampledFunction& f, const SearchParams& sp) {
  SupDomain d;
  d.lo = std::max(f.grid().x_min(), sp.sup_lo);
  d.hi = std::min(f.grid().x_max(), sp.sup_hi);
  if (!(d.hi > d.lo)) throw std::invalid_argument("bmo search: empty sup domain");
  d.center = std::clamp(f.grid().grading_point(), d.lo, d.hi);
  return d;
}

std::vector<double> lattice_lengths(double len_min, double len_max, int density) {
  std::vector<double> out;
  if (!(len_max > len_min)) {
    if (len_max == len_min) out.push_back(len_min);
    return out;
  }
  const int steps =
      std::max(1, static_cast<int>(std::ceil(std::log10(len_max / len_min) * density)));
  out.reserve(steps + 1);
  const double ratio = std::pow(len_max / len_min, 1.0 / steps);
  for (int i = 0; i <= steps; ++i) out.push_back(len_min * std::pow(ratio, i));
  out.back() = len_max;
  return out;
}

std::vector<double> lattice_centers(const SupDomain& d, double len, double min_cell,
                                    int density) {
  const double clo = d.lo + 0.5 * len;
  const double chi = d.hi - 0.5 * len;
  std::vector<double> cs;
  if (!(chi >= clo)) return cs;
  cs.push_back(clo);
  cs.push_back(chi);
  for (int i = 0; i < 9; ++i) cs.push_back(clo + (chi - clo) * (i + 0.5) / 9.0);
  // log-spaced distances from the focus, both sides
  const double dmin = std::max(0.25 * len, min_cell);
  const double dmax = std::max(d.hi - d.center, d.center - d.lo);
  if (dmax > dmin) {
    const int steps = std::max(1, static_cast<int>(std::ceil(std::log10(dmax / dmin) * density)));
    const double ratio = std::pow(dmax / dmin, 1.0 / steps);
    for (int i = 0; i <= steps; ++i) {
      const double dist = dmin * std::pow(ratio, i);
      for (double c : {d.center - dist, d.center + dist})
        if (c >= clo && c <= chi) cs.push_back(c);
    }
  }
  if (d.center >= clo && d.center <= chi) cs.push_back(d.center);
  return cs;
}

double golden_max_fn(const std::function<double(double)>& fn, double lo, double hi, int iters,
                     double* arg) {
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
  if (fc > fd) {
    if (arg) *arg = c;
    return fc;
  }
  if (arg) *arg = d;
  return fd;
}

struct SupResult {
  double sup = 0.0;
  double a = 0.0, b = 0.0;
  std::vector<std::pair<double, double>> per_scale;  // (physical length, value)
};

// Shared lattice + polish engine. inv_weight maps grid-unit length to the
// multiplier 1/phi(physical length).
SupResult sup_search(const SampledFunction& f, double delta_grid, const SearchParams& sp,
                     double log_scale, const std::function<double(double)>& inv_weight) {
  const SupDomain dom = sup_domain(f, sp);
  const double span = dom.hi - dom.lo;
  const double min_cell = f.grid().min_cell();
  const double len_min = 4.0 * min_cell;
  const double len_max = std::min(delta_grid * (1.0 - 1e-12), span * (1.0 - 1e-12));

  SupResult res;
  if (span < len_min) throw std::invalid_argument("bmo search: hull shorter than the minimal interval");
  if (len_max < len_min) {
    res.a = res.b = dom.lo;  // no admissible interval below delta
    return res;
  }
  res.a = dom.lo;
  res.b = std::min(dom.lo + len_min, dom.hi);  // smallest lattice interval

  auto value_at = [&](double len, double c) {
    const Interval q(c - 0.5 * len, c + 0.5 * len);
    return mean_oscillation(f, q) * inv_weight(len);
  };

  const std::vector<double> lens = lattice_lengths(len_min, len_max, sp.density);
  struct PerLen {
    double best = -kInf;
    double c = 0.0;
  };
  std::vector<PerLen> per_len(lens.size());
  parallel_for(lens.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t li = lo; li < hi; ++li) {
      const double len = lens[li];
      PerLen best;
      for (double c : lattice_centers(dom, len, min_cell, sp.density)) {
        const double v = value_at(len, c);
        if (v > best.best) {
          best.best = v;
          best.c = c;
        }
      }
      per_len[li] = best;
    }
  });

  std::size_t arg_li = lens.size();
  for (std::size_t li = 0; li < lens.size(); ++li) {
    if (per_len[li].best > res.sup) {
      res.sup = per_len[li].best;
      arg_li = li;
    }
    res.per_scale.emplace_back(std::exp(log_scale) * lens[li],
                               std::max(per_len[li].best, 0.0));
  }
  if (arg_li == lens.size()) return res;  // everything degenerate

  double best_len = lens[arg_li];
  double best_c = per_len[arg_li].c;
  if (sp.polish) {
    // multi-start coordinate polish from the strongest lattice lengths
    std::vector<std::size_t> order(lens.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&per_len](std::size_t a, std::size_t b) {
      return per_len[a].best > per_len[b].best;
    });
    const std::size_t starts = std::min<std::size_t>(3, order.size());
    const double step = lens.size() > 1 ? lens[1] / lens[0] : 2.0;
    for (std::size_t s = 0; s < starts; ++s) {
      double len = lens[order[s]];
      double c = per_len[order[s]].c;
      if (!(per_len[order[s]].best > 0.0)) continue;
      for (int round = 0; round < 6; ++round) {
        const double dcl = std::max(0.5 * len, 2.0 * min_cell);
        const double clo = std::max(dom.lo + 0.5 * len, c - dcl);
        const double chi = std::min(dom.hi - 0.5 * len, c + dcl);
        if (chi > clo)
          golden_max_fn([&](double cc) { return value_at(len, cc); }, clo, chi, 48, &c);
        const double llo = std::max(len_min, len / step);
        const double lhi = std::min(len_max, len * step);
        auto len_val = [&](double ll) {
          const double cadj = std::clamp(c, dom.lo + 0.5 * ll, dom.hi - 0.5 * ll);
          return value_at(ll, cadj);
        };
        if (lhi > llo) golden_max_fn(len_val, llo, lhi, 48, &len);
        c = std::clamp(c, dom.lo + 0.5 * len, dom.hi - 0.5 * len);
      }
      const double polished = value_at(len, c);
      if (polished > res.sup) {
        res.sup = polished;
        best_len = len;
        best_c = c;
        res.per_scale.emplace_back(std::exp(log_scale) * len, polished);
      }
    }
  }
  res.a = best_c - 0.5 * best_len;
  res.b = best_c + 0.5 * best_len;
  return res;
}

double grid_delta(double delta, double log_scale, double span) {
  // physical delta expressed in grid units, saturating instead of overflowing
  const double ln = std::log(delta) - log_scale;
  if (ln > 700.0) return span;
  return std::exp(ln);
}

OscillationReport assemble(const SampledFunction& f, double delta, double log_scale,
                           const SupResult& sr) {
  OscillationReport rep;
  rep.delta = delta;
  const Interval hull(f.grid().x_min(), f.grid().x_max());
  rep.l1_part = integrate_abs(f, hull) * std::exp(log_scale);
  rep.sup_part = sr.sup;
  rep.norm_value = rep.l1_part + rep.sup_part;
  rep.argmax_a = sr.a;
  rep.argmax_b = sr.b;
  rep.per_scale = sr.per_scale;
  return rep;
}

}  // namespace

LengthWeight make_tabulated_weight(std::vector<double> lengths, std::vector<double> phis) {
  if (lengths.size() != phis.size() || lengths.size() < 2)
    throw std::invalid_argument("make_tabulated_weight: need >= 2 matching samples");
  std::vector<double> lx(lengths.size()), ly(lengths.size());
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (!(lengths[i] > 0.0) || !(phis[i] > 0.0))
      throw std::invalid_argument("make_tabulated_weight: samples must be positive");
    if (i > 0 && !(lengths[i] > lengths[i - 1]))
      throw std::invalid_argument("make_tabulated_weight: lengths must increase");
    lx[i] = std::log(lengths[i]);
    ly[i] = std::log(phis[i]);
  }
  return [lx = std::move(lx), ly = std::move(ly)](double ln_len) {
    if (ln_len <= lx.front()) return std::exp(ly.front());
    if (ln_len >= lx.back()) return std::exp(ly.back());
    const auto it = std::upper_bound(lx.begin(), lx.end(), ln_len);
    const std::size_t i = static_cast<std::size_t>(it - lx.begin()) - 1;
    const double t = (ln_len - lx[i]) / (lx[i + 1] - lx[i]);
    return std::exp(ly[i] + t * (ly[i + 1] - ly[i]));
  };
}

OscillationReport weighted_bmo_norm(const SampledFunction& f, const LengthWeight& phi_of_len,
                                    double delta, const SearchParams& sp, double log_scale) {
  if (!(delta > 0.0)) throw std::invalid_argument("weighted_bmo_norm: delta must be positive");
  auto inv_weight = [&phi_of_len, log_scale](double len) {
    return 1.0 / phi_of_len(log_scale + std::log(len));
  };
  const SupResult sr =
      sup_search(f, grid_delta(delta, log_scale, f.grid().span()), sp, log_scale, inv_weight);
  return assemble(f, delta, log_scale, sr);
}

OscillationReport weighted_bmo_norm(const SampledFunction& f, const LogWeight& w, double delta,
                                    const SearchParams& sp, double log_scale) {
  if (!(delta < w.x_safe()))
    throw std::invalid_argument("weighted_bmo_norm: delta must be below the weight's x_safe");
  return weighted_bmo_norm(
      f, [&w](double ln_len) { return w.phi_from_neglog(std::abs(ln_len)); }, delta, sp,
      log_scale);
}

OscillationReport unweighted_bmo_norm(const SampledFunction& f, double delta,
                                      const SearchParams& sp) {
  if (!(delta > 0.0)) throw std::invalid_argument("unweighted_bmo_norm: delta must be positive");
  const SupResult sr = sup_search(f, grid_delta(delta, 0.0, f.grid().span()), sp, 0.0,
                                  [](double) { return 1.0; });
  return assemble(f, delta, 0.0, sr);
}

MultiplierRatio multiplier_inequality_ratio(const SampledFunction& f, const SampledFunction& g,
                                            const LogWeight& w, double delta,
                                            const SearchParams& sp) {
  if (f.grid().nodes() != g.grid().nodes())
    throw std::invalid_argument("multiplier_inequality_ratio: f and g must share a grid");

  std::vector<double> prod(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f.values()[i] * g.values()[i];
  const SampledFunction fg(f.grid(), std::move(prod));

  MultiplierRatio out;
  out.fg_norm = unweighted_bmo_norm(fg, delta, sp).norm_value;
  out.f_norm = weighted_bmo_norm(f, w, delta, sp).norm_value;
  for (double v : g.values()) out.g_inf = std::max(out.g_inf, std::abs(v));
  // g measured against the reciprocal of phi_star: dividing by 1/phi_star(len)
  // multiplies the oscillation by phi_star(len)
  const SupResult sr = sup_search(
      g, grid_delta(delta, 0.0, g.grid().span()), sp, 0.0,
      [&w](double len) { return w.phi_star_from_neglog(std::abs(std::log(len))); });
  out.g_sup_part = sr.sup;

  const double denom = out.f_norm * (out.g_inf + out.g_sup_part);
  if (!(denom > 0.0))
    throw std::domain_error("multiplier_inequality_ratio: zero denominator");
  out.ratio = out.fg_norm / denom;
  return out;
}

DerivativeCheckReport derivative_oscillation_check(const SampledFunction& f,
                                                   const std::vector<double>& fprime,
                                                   const LogWeight& w, double max_len,
                                                   const SearchParams& sp) {
  if (fprime.size() != f.size())
    throw std::invalid_argument("derivative_oscillation_check: derivative size mismatch");
  const auto& xs = f.grid().nodes();
  const auto& vs = f.values();
  DerivativeCheckReport rep;

  // evenness on a symmetric hull: compare mirrored node values
  double scale = 0.0;
  for (double v : vs) scale = std::max(scale, std::abs(v));
  if (std::abs(xs.front() + xs.back()) <= 1e-9 * f.grid().span()) {
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double mirrored = f.value_at(std::clamp(-xs[i], xs.front(), xs.back()));
      worst = std::max(worst, std::abs(mirrored - vs[i]));
    }
    rep.even_ok = worst <= 1e-6 * std::max(scale, 1.0);
  }

  // |f'| envelope: |f'(x)| <= c |f'(y)| whenever |x| >= |y|
  {
    std::vector<std::pair<double, double>> ad;  // (|x|, |f'|)
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (xs[i] != 0.0) ad.emplace_back(std::abs(xs[i]), std::abs(fprime[i]));
    std::sort(ad.begin(), ad.end());
    double run_min = kInf, cenv = 0.0;
    for (auto& [ax, d] : ad) {
      if (run_min < kInf && run_min > 0.0) cenv = std::max(cenv, d / run_min);
      run_min = std::min(run_min, d);
    }
    rep.envelope_ok = cenv <= 10.0;
  }

  // decreasing + convex on the positive side up to 1
  {
    bool mono = true, convex = true;
    double prev_d = -kInf;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] <= 0.0 || xs[i] >= 1.0) continue;
      if (fprime[i] > 1e-9 * std::max(scale, 1.0)) mono = false;
      if (prev_d != -kInf && fprime[i] < prev_d - 1e-9 * std::max(scale, 1.0)) convex = false;
      prev_d = fprime[i];
    }
    rep.monotone_convex_ok = mono && convex;
  }

  // pointwise derivative ratios on nodes inside the weight's domain
  const double x_cap = 0.95 * w.x_safe();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double ax = std::abs(xs[i]);
    if (!(ax > 0.0) || ax >= x_cap) continue;
    const double ratio = std::abs(xs[i] * fprime[i]) / w.phi(ax);
    rep.forward_hypothesis_c = std::max(rep.forward_hypothesis_c, ratio);
    if (xs[i] > 0.0) {
      rep.converse_derivative_c = std::max(rep.converse_derivative_c, ratio);
      if (4.0 * ax < x_cap)
        rep.converse_lower_c = std::max(
            rep.converse_lower_c, std::abs(xs[i] * fprime[i]) / w.phi(4.0 * ax));
    }
  }

  // forward constant: sup over the interval lattice of mean osc / phi(|I|)
  const double delta = std::min({max_len, 0.95 * w.x_safe(), f.grid().span() * 0.999});
  const SupResult sr =
      sup_search(f, delta, sp, 0.0,
                 [&w](double len) { return 1.0 / w.phi_from_neglog(std::abs(std::log(len))); });
  rep.forward_constant = sr.sup;
  return rep;
}

}  // namespace oscilab
