#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "mpsg/max_scalar.hpp"

namespace mpsg {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// One cell-centered uniform axis: n cells of width (hi - lo) / n.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 2;
  bool periodic = false;

  double width() const noexcept { return (hi - lo) / static_cast<double>(n); }
  double center(std::size_t i) const noexcept { return lo + (static_cast<double>(i) + 0.5) * width(); }

  friend bool operator==(const Axis&, const Axis&) = default;
};

/// A uniform tensor grid of dimension 1 or 2. Values are stored row-major
/// with the first axis outermost: flat index = i * n_y + j.
class Grid {
 public:
  /// 1-D grid. Throws std::invalid_argument unless xmin < xmax and n >= 2.
  Grid(double xmin, double xmax, std::size_t n, bool periodic = false);
  /// 2-D tensor grid.
  Grid(const Axis& x, const Axis& y);

  std::size_t dim() const noexcept { return dim_; }
  const Axis& axis(std::size_t d) const { return axes_.at(d); }
  std::size_t size() const noexcept { return dim_ == 1 ? axes_[0].n : axes_[0].n * axes_[1].n; }
  double cell_volume() const noexcept;
  /// Smallest cell width over all axes.
  double min_width() const noexcept;

  // 1-D accessors (first axis).
  double xmin() const noexcept { return axes_[0].lo; }
  double xmax() const noexcept { return axes_[0].hi; }
  std::size_t n() const noexcept { return axes_[0].n; }
  bool periodic() const noexcept { return axes_[0].periodic; }
  double dx() const noexcept { return axes_[0].width(); }
  double x(std::size_t i) const noexcept { return axes_[0].center(i); }

  /// Cell center of flat index k (second coordinate is 0 on 1-D grids).
  std::array<double, 2> point(std::size_t k) const noexcept;

  /// The same box with every axis refined by `factor`.
  Grid refined(std::size_t factor) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  static void validate(const Axis& a);
  std::array<Axis, 2> axes_{};
  std::size_t dim_ = 1;
};

/// A cell-centered sample of a function X -> R_max. Immutable after
/// construction; values are never NaN or +inf, bottom is stored as -inf.
class GridFunction {
 public:
  GridFunction(Grid grid, std::vector<double> values);

  /// 0_X: every value bottom.
  static GridFunction bottom(const Grid& grid);
  static GridFunction constant(const Grid& grid, double c);
  /// Samples fn at cell centers; fn takes x on 1-D grids and (x, y) on 2-D.
  template <class Fn>
  static GridFunction sample(const Grid& grid, Fn&& fn);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  MaxScalar operator[](std::size_t i) const { return MaxScalar(values_[i]); }
  double value(std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  /// Member of C_fin: no value is bottom.
  bool is_finite() const noexcept;
  bool is_all_bottom() const noexcept;

  friend bool operator==(const GridFunction& a, const GridFunction& b) {
    return a.grid_ == b.grid_ && a.values_ == b.values_;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

enum class Norm { L1, Sup };

std::string_view to_string(Norm norm) noexcept;
Norm parse_norm(std::string_view s);

void require_same_grid(const GridFunction& f, const GridFunction& g);
void require_finite(const GridFunction& f, std::string_view where);

// -- max-plus vector space operations -------------------------------------

GridFunction pw_oplus(const GridFunction& f, const GridFunction& g);
GridFunction pw_otimes(MaxScalar a, const GridFunction& f);
/// Standard order: f <= g iff f (+) g == g, i.e. pointwise <=.
bool precedes(const GridFunction& f, const GridFunction& g);

struct LatticeParts {
  GridFunction pos;
  GridFunction neg;
  GridFunction abs;
};

/// pos = f (+) Theta, neg = (-f) (+) Theta, abs = pos + neg. f must be finite.
LatticeParts lattice_decompose(const GridFunction& f);

// -- ordinary (Banach space) arithmetic on finite functions ---------------

GridFunction add(const GridFunction& f, const GridFunction& g);
GridFunction subtract(const GridFunction& f, const GridFunction& g);
GridFunction scale(double c, const GridFunction& f);

// -- norms -----------------------------------------------------------------

/// Sum of finite doubles, correctly rounded (Shewchuk partials with a final
/// half-even fix-up). The result does not depend on the order of the terms,
/// so permuting cells leaves L1 norms and masses bit-identical.
class ExactSum {
 public:
  void add(double x);
  double value() const;

 private:
  std::vector<double> partials_;
};

double exact_sum(std::span<const double> values);

/// Cell volume times the exactly rounded sum of |f_i|. Rejects bottom entries.
double norm_l1(const GridFunction& f);
/// max_i |f_i|. Rejects bottom entries.
double norm_sup(const GridFunction& f);
double norm(const GridFunction& f, Norm which);

/// ||f - g|| computed from the pointwise difference.
double dist(const GridFunction& f, const GridFunction& g, Norm which);
/// ||f - g|| computed through |f - g| = 2 (f (+) g) - f - g. Agrees with dist()
/// bit for bit.
double dist_via_max(const GridFunction& f, const GridFunction& g, Norm which);
/// ||(f - g)^+||, the size of the violation of f <= g.
double positive_part_norm(const GridFunction& f, const GridFunction& g, Norm which);

// -- text format -------------------------------------------------------------
//
// Header `grid xmin xmax n periodic` (2-D: the axis quadruple twice), then the
// values separated by whitespace, `-inf` for bottom. Finite doubles round-trip
// bit for bit.

void write_grid_function(std::ostream& out, const GridFunction& f);
GridFunction read_grid_function(std::istream& in);
void write_grid_function(const std::filesystem::path& path, const GridFunction& f);
GridFunction read_grid_function(const std::filesystem::path& path);

std::string grid_header(const Grid& grid);

// -- implementation --------------------------------------------------------

template <class Fn>
GridFunction GridFunction::sample(const Grid& grid, Fn&& fn) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto p = grid.point(k);
    if constexpr (std::is_invocable_v<Fn&, double, double>) {
      v[k] = fn(p[0], p[1]);
    } else {
      v[k] = fn(p[0]);
    }
  }
  return GridFunction(grid, std::move(v));
}

}  // namespace mpsg
