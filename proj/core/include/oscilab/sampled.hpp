#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace oscilab {

enum class Grading { uniform, geometric, explicit_nodes };

/// Strictly increasing 1-D grid. Immutable after construction.
class Grid1D {
 public:
  Grid1D(std::vector<double> nodes, Grading grading, double grading_point = 0.0);

  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  double x_min() const { return nodes_.front(); }
  double x_max() const { return nodes_.back(); }
  double span() const { return x_max() - x_min(); }
  Grading grading() const { return grading_; }
  /// Point the grid is graded toward (meaningful for geometric grids;
  /// explicit composite grids keep it as a hint for searches).
  double grading_point() const { return grading_point_; }
  double min_cell() const { return min_cell_; }

  /// Index of the cell [x_i, x_{i+1}] containing x (clamped to valid cells).
  std::size_t cell_of(double x) const;

 private:
  std::vector<double> nodes_;
  Grading grading_;
  double grading_point_;
  double min_cell_;
};

/// make_grid(0,1,3,uniform) -> {0, 0.5, 1}. Geometric grading requires the
/// target point on or beyond one end of [x_min, x_max]; node offsets from the
/// target then form a geometric progression.
Grid1D make_grid(double x_min, double x_max, std::size_t n, Grading grading,
                 double grading_point = 0.0);

/// Symmetric grid on [-b, -floor] U {0} U [floor, b], geometric toward 0 with
/// `per_decade` nodes per decade on each side.
Grid1D symmetric_log_grid(double floor, double b, int per_decade);

/// Merges node packs into one strictly increasing explicit grid (dedup within
/// rel_tol of the local scale).
Grid1D merge_grids(const std::vector<std::vector<double>>& packs, double grading_point = 0.0);

/// Closed interval [a, b]; the 1-D "cube" Q. length() == measure in 1-D.
struct Interval {
  double a;
  double b;
  Interval(double a_, double b_);
  double length() const { return b - a; }
  double mid() const { return 0.5 * (a + b); }
};

/// Real function sampled on a grid; interpolated piecewise-linearly between
/// nodes. Values must be finite.
class SampledFunction {
 public:
  SampledFunction(Grid1D grid, std::vector<double> values);

  const Grid1D& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  double value_at(double x) const;  // piecewise-linear; x must be in hull

  /// CSV with header "x,value", 17 significant digits (round-trips exactly).
  void write_csv(std::ostream& os) const;
  void write_csv_file(const std::string& path) const;
  static SampledFunction read_csv(std::istream& is);
  static SampledFunction read_csv_file(const std::string& path);

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

/// Builds a SampledFunction by evaluating fn at every node.
template <typename Fn>
SampledFunction sample(const Grid1D& grid, Fn&& fn) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = fn(grid.nodes()[i]);
  return SampledFunction(grid, std::move(v));
}

/// Average (1/|Q|) \int_Q f with trapezoidal quadrature, exact for the
/// piecewise-linear interpolant. Q endpoints may fall between nodes.
double average(const SampledFunction& f, const Interval& q);

/// \int_Q |f - shift| with sign-change points located exactly by linear root.
double integrate_abs(const SampledFunction& f, const Interval& q, double shift = 0.0);

/// Convolution with the normalized bump exp(-1/(1-(u/w)^2)) on |u| < w,
/// resampled on the same grid. The function is extended by its endpoint
/// values beyond the hull. Preserves constants exactly and affine pieces away
/// from kinks; preserves the total integral when f is constant within `width`
/// of each hull end and the non-affine region is uniformly meshed.
SampledFunction mollify(const SampledFunction& f, double width);

}  // namespace oscilab
