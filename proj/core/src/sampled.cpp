#include "oscilab/sampled.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace oscilab {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Grid1D::Grid1D(std::vector<double> nodes, Grading grading, double grading_point)
    : nodes_(std::move(nodes)), grading_(grading), grading_point_(grading_point) {
  require(nodes_.size() >= 2, "Grid1D: at least 2 nodes required");
  min_cell_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    require(std::isfinite(nodes_[i]), "Grid1D: nodes must be finite");
    if (i > 0) {
      require(nodes_[i] > nodes_[i - 1], "Grid1D: nodes must be strictly increasing");
      min_cell_ = std::min(min_cell_, nodes_[i] - nodes_[i - 1]);
    }
  }
  if (grading_ == Grading::geometric) {
    // ratio (x_{i+1}-c)/(x_i-c) constant within 1e-12 on the graded side
    const double r0 = (nodes_[1] - grading_point_) / (nodes_[0] - grading_point_);
    for (std::size_t i = 1; i + 1 < nodes_.size(); ++i) {
      const double r = (nodes_[i + 1] - grading_point_) / (nodes_[i] - grading_point_);
      require(std::abs(r - r0) <= 1e-12 * std::abs(r0),
              "Grid1D: geometric grading ratio not constant");
    }
  }
}

std::size_t Grid1D::cell_of(double x) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  std::size_t idx = (it == nodes_.begin()) ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  if (idx + 1 >= nodes_.size()) idx = nodes_.size() - 2;
  return idx;
}

Grid1D make_grid(double x_min, double x_max, std::size_t n, Grading grading,
                 double grading_point) {
  require(std::isfinite(x_min) && std::isfinite(x_max), "make_grid: bounds must be finite");
  require(x_min < x_max, "make_grid: x_min must be < x_max");
  require(n >= 2, "make_grid: n must be >= 2");
  std::vector<double> nodes(n);
  switch (grading) {
    case Grading::uniform: {
      const double h = (x_max - x_min) / static_cast<double>(n - 1);
      for (std::size_t i = 0; i < n; ++i) nodes[i] = x_min + h * static_cast<double>(i);
      nodes.back() = x_max;
      return Grid1D(std::move(nodes), Grading::uniform);
    }
    case Grading::geometric: {
      const double c = grading_point;
      require(c <= x_min || c >= x_max,
              "make_grid: geometric grading point must lie on or beyond one hull end");
      // Work with positive offsets from c; reverse at the end if c is above.
      const bool below = (c <= x_min);
      const double d0 = below ? (x_min - c) : (c - x_max);
      const double d1 = below ? (x_max - c) : (c - x_min);
      require(d0 > 0.0, "make_grid: geometric grading needs a positive offset from the target");
      const double ratio = std::pow(d1 / d0, 1.0 / static_cast<double>(n - 1));
      for (std::size_t i = 0; i < n; ++i) {
        const double d = d0 * std::pow(ratio, static_cast<double>(i));
        nodes[i] = below ? c + d : c - d;
      }
      if (!below) std::reverse(nodes.begin(), nodes.end());
      nodes.front() = x_min;
      nodes.back() = x_max;
      return Grid1D(std::move(nodes), Grading::geometric, c);
    }
    case Grading::explicit_nodes:
      throw std::invalid_argument("make_grid: explicit grading takes nodes via Grid1D directly");
  }
  throw std::invalid_argument("make_grid: unknown grading");
}

Grid1D symmetric_log_grid(double floor, double b, int per_decade) {
  require(floor > 0.0 && b > floor, "symmetric_log_grid: need 0 < floor < b");
  require(per_decade >= 2, "symmetric_log_grid: per_decade must be >= 2");
  const double decades = std::log10(b / floor);
  const std::size_t m = static_cast<std::size_t>(std::ceil(decades * per_decade)) + 1;
  std::vector<double> side(m);
  const double ratio = std::pow(b / floor, 1.0 / static_cast<double>(m - 1));
  for (std::size_t i = 0; i < m; ++i) side[i] = floor * std::pow(ratio, static_cast<double>(i));
  side.back() = b;
  std::vector<double> nodes;
  nodes.reserve(2 * m + 1);
  for (std::size_t i = m; i-- > 0;) nodes.push_back(-side[i]);
  nodes.push_back(0.0);
  for (std::size_t i = 0; i < m; ++i) nodes.push_back(side[i]);
  return Grid1D(std::move(nodes), Grading::explicit_nodes, 0.0);
}

Grid1D merge_grids(const std::vector<std::vector<double>>& packs, double grading_point) {
  std::vector<double> all;
  for (const auto& p : packs) all.insert(all.end(), p.begin(), p.end());
  require(all.size() >= 2, "merge_grids: need at least 2 nodes");
  std::sort(all.begin(), all.end());
  std::vector<double> nodes;
  nodes.reserve(all.size());
  nodes.push_back(all.front());
  for (double x : all) {
    // relative dedup keeps fine structure near 0 while dropping ulp-duplicates
    const double tol = 1e-15 * std::max(std::abs(x), std::abs(nodes.back()));
    if (x - nodes.back() > tol) nodes.push_back(x);
  }
  return Grid1D(std::move(nodes), Grading::explicit_nodes, grading_point);
}

Interval::Interval(double a_, double b_) : a(a_), b(b_) {
  require(std::isfinite(a) && std::isfinite(b), "Interval: endpoints must be finite");
  require(a < b, "Interval: need a < b");
}

SampledFunction::SampledFunction(Grid1D grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(values_.size() == grid_.size(), "SampledFunction: values/nodes length mismatch");
  for (double v : values_) require(std::isfinite(v), "SampledFunction: values must be finite");
}

double SampledFunction::value_at(double x) const {
  const auto& xs = grid_.nodes();
  require(x >= xs.front() - 1e-12 * grid_.span() && x <= xs.back() + 1e-12 * grid_.span(),
          "value_at: x outside grid hull");
  x = std::clamp(x, xs.front(), xs.back());
  const std::size_t i = grid_.cell_of(x);
  const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return values_[i] + t * (values_[i + 1] - values_[i]);
}

void SampledFunction::write_csv(std::ostream& os) const {
  os << "x,value\n";
  char buf[64];
  for (std::size_t i = 0; i < size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", grid_.nodes()[i], values_[i]);
    os << buf;
  }
}

void SampledFunction::write_csv_file(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_csv_file: cannot open " + path);
  write_csv(os);
}

SampledFunction SampledFunction::read_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), "read_csv: empty input");
  // strip optional BOM / CR and check header
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "x,value", "read_csv: expected header 'x,value'");
  std::vector<double> xs, vs;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    require(comma != std::string::npos, "read_csv: malformed row");
    xs.push_back(std::stod(line.substr(0, comma)));
    vs.push_back(std::stod(line.substr(comma + 1)));
  }
  return SampledFunction(Grid1D(std::move(xs), Grading::explicit_nodes), std::move(vs));
}

SampledFunction SampledFunction::read_csv_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_csv_file: cannot open " + path);
  return read_csv(is);
}

namespace {

void check_interval_in_hull(const Grid1D& g, const Interval& q) {
  const double tol = 1e-12 * g.span();
  require(q.a >= g.x_min() - tol && q.b <= g.x_max() + tol,
          "interval outside grid hull");
}

// integral of the interpolant over [a, b] clipped to one cell
double cell_integral(double xa, double xb, double fa, double fb, double a, double b) {
  const double va = fa + (a - xa) / (xb - xa) * (fb - fa);
  const double vb = fa + (b - xa) / (xb - xa) * (fb - fa);
  return 0.5 * (va + vb) * (b - a);
}

}  // namespace

double average(const SampledFunction& f, const Interval& q) {
  check_interval_in_hull(f.grid(), q);
  const auto& xs = f.grid().nodes();
  const auto& vs = f.values();
  const double a = std::clamp(q.a, xs.front(), xs.back());
  const double b = std::clamp(q.b, xs.front(), xs.back());
  require(b > a, "average: degenerate interval");
  double acc = 0.0;
  std::size_t i = f.grid().cell_of(a);
  double left = a;
  while (left < b) {
    const double right = std::min(b, xs[i + 1]);
    acc += cell_integral(xs[i], xs[i + 1], vs[i], vs[i + 1], left, right);
    left = right;
    if (i + 2 < xs.size()) ++i;
    if (left >= xs.back()) break;
  }
  return acc / (b - a);
}

double integrate_abs(const SampledFunction& f, const Interval& q, double shift) {
  check_interval_in_hull(f.grid(), q);
  const auto& xs = f.grid().nodes();
  const auto& vs = f.values();
  const double a = std::clamp(q.a, xs.front(), xs.back());
  const double b = std::clamp(q.b, xs.front(), xs.back());
  require(b > a, "integrate_abs: degenerate interval");
  double acc = 0.0;
  std::size_t i = f.grid().cell_of(a);
  double left = a;
  while (left < b) {
    const double right = std::min(b, xs[i + 1]);
    const double xa = xs[i], xb = xs[i + 1];
    const double fa = vs[i] - shift, fb = vs[i + 1] - shift;
    const double va = fa + (left - xa) / (xb - xa) * (fb - fa);
    const double vb = fa + (right - xa) / (xb - xa) * (fb - fa);
    if (va == 0.0 || vb == 0.0 || (va > 0) == (vb > 0)) {
      acc += 0.5 * std::abs(va + vb) * (right - left);
    } else {
      // linear root inside (left, right): split exactly
      const double root = left + (right - left) * (va / (va - vb));
      acc += 0.5 * std::abs(va) * (root - left);
      acc += 0.5 * std::abs(vb) * (right - root);
    }
    left = right;
    if (i + 2 < xs.size()) ++i;
    if (left >= xs.back()) break;
  }
  return acc;
}

namespace {

double bump(double t) {  // unnormalized C^inf bump on (-1, 1)
  const double s = 1.0 - t * t;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

// extend f by endpoint values beyond the hull
double extended_value(const SampledFunction& f, double x) {
  const auto& xs = f.grid().nodes();
  if (x <= xs.front()) return f.values().front();
  if (x >= xs.back()) return f.values().back();
  return f.value_at(x);
}

}  // namespace

SampledFunction mollify(const SampledFunction& f, double width) {
  require(width > 0.0, "mollify: width must be positive");
  require(width < f.grid().span(), "mollify: width exceeds grid hull");
  const auto& xs = f.grid().nodes();

  // Symmetric quadrature offsets for the kernel support [-w, w]: per node,
  // segment boundaries are the kernel subdivisions plus f's kink offsets; the
  // positive-side segments are mirrored so odd moments cancel exactly.
  constexpr int kSub = 16;        // fixed kernel subdivision (per half)
  constexpr int kGauss = 8;       // Gauss-Legendre points per segment
  static const double gl_x[kGauss] = {
      -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
      0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
  static const double gl_w[kGauss] = {
      0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
      0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = xs[i];
    // positive-side segment boundaries in offset units u in (0, w]
    std::vector<double> cuts;
    cuts.reserve(kSub + 16);
    for (int s = 1; s <= kSub; ++s) cuts.push_back(width * s / kSub);
    const auto lo_it = std::lower_bound(xs.begin(), xs.end(), x - width);
    const auto hi_it = std::upper_bound(xs.begin(), xs.end(), x + width);
    for (auto it = lo_it; it != hi_it; ++it) {
      const double d = std::abs(*it - x);
      if (d > 0.0 && d < width) cuts.push_back(d);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double num = 0.0, den = 0.0;
    double lo = 0.0;
    for (double hi : cuts) {
      const double half = 0.5 * (hi - lo);
      const double mid = 0.5 * (hi + lo);
      for (int g = 0; g < kGauss; ++g) {
        const double u = mid + half * gl_x[g];
        const double k = bump(u / width) * gl_w[g] * half;
        // mirrored pair keeps the quadrature symmetric about x
        num += k * (extended_value(f, x - u) + extended_value(f, x + u));
        den += 2.0 * k;
      }
      lo = hi;
    }
    out[i] = num / den;  // normalization makes constants exact fixed points
  }
  return SampledFunction(f.grid(), std::move(out));
}

}  // namespace oscilab
