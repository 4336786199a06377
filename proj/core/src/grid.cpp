#include "mpsg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mpsg/errors.hpp"

namespace mpsg {

void Grid::validate(const Axis& a) {
  if (!(a.lo < a.hi) || !std::isfinite(a.lo) || !std::isfinite(a.hi))
    throw std::invalid_argument("Grid: need finite xmin < xmax");
  if (a.n < 2) throw std::invalid_argument("Grid: need at least 2 cells");
}

Grid::Grid(double xmin, double xmax, std::size_t n, bool periodic) {
  axes_[0] = Axis{xmin, xmax, n, periodic};
  axes_[1] = Axis{0.0, 1.0, 1, false};
  dim_ = 1;
  validate(axes_[0]);
}

Grid::Grid(const Axis& x, const Axis& y) : axes_{x, y}, dim_(2) {
  validate(x);
  validate(y);
}

double Grid::cell_volume() const noexcept {
  return dim_ == 1 ? axes_[0].width() : axes_[0].width() * axes_[1].width();
}

double Grid::min_width() const noexcept {
  return dim_ == 1 ? axes_[0].width() : std::min(axes_[0].width(), axes_[1].width());
}

std::array<double, 2> Grid::point(std::size_t k) const noexcept {
  if (dim_ == 1) return {axes_[0].center(k), 0.0};
  const std::size_t ny = axes_[1].n;
  return {axes_[0].center(k / ny), axes_[1].center(k % ny)};
}

Grid Grid::refined(std::size_t factor) const {
  if (factor == 0) throw std::invalid_argument("Grid::refined: factor must be positive");
  if (dim_ == 1) return Grid(axes_[0].lo, axes_[0].hi, axes_[0].n * factor, axes_[0].periodic);
  Axis x = axes_[0];
  Axis y = axes_[1];
  x.n *= factor;
  y.n *= factor;
  return Grid(x, y);
}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("GridFunction: " + std::to_string(values_.size()) + " values for a grid of " +
                                std::to_string(grid_.size()) + " cells");
  for (double v : values_) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw std::invalid_argument("GridFunction: NaN or +inf value");
  }
}

GridFunction GridFunction::bottom(const Grid& grid) {
  return GridFunction(grid, std::vector<double>(grid.size(), -std::numeric_limits<double>::infinity()));
}

GridFunction GridFunction::constant(const Grid& grid, double c) {
  return GridFunction(grid, std::vector<double>(grid.size(), c));
}

bool GridFunction::is_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool GridFunction::is_all_bottom() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isinf(v); });
}

std::string_view to_string(Norm norm) noexcept { return norm == Norm::L1 ? "L1" : "SUP"; }

Norm parse_norm(std::string_view s) {
  if (s == "L1" || s == "l1") return Norm::L1;
  if (s == "SUP" || s == "sup" || s == "Sup") return Norm::Sup;
  throw std::invalid_argument("unknown norm '" + std::string(s) + "' (expected L1 or SUP)");
}

void require_same_grid(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid() == g.grid())) throw GridMismatch("grid functions live on different grids");
}

void require_finite(const GridFunction& f, std::string_view where) {
  if (!f.is_finite()) throw BottomValueError(std::string(where) + ": function has bottom (-inf) entries");
}

GridFunction pw_oplus(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  std::vector<double> out(f.size());
  const auto a = f.values();
  const auto b = g.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] < b[i] ? b[i] : a[i];
  return GridFunction(f.grid(), std::move(out));
}

GridFunction pw_otimes(MaxScalar a, const GridFunction& f) {
  if (a.is_bottom()) return GridFunction::bottom(f.grid());
  std::vector<double> out(f.size());
  const auto v = f.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = otimes(a, MaxScalar(v[i])).raw();
  return GridFunction(f.grid(), std::move(out));
}

bool precedes(const GridFunction& f, const GridFunction& g) { return pw_oplus(f, g) == g; }

LatticeParts lattice_decompose(const GridFunction& f) {
  require_finite(f, "lattice_decompose");
  const std::size_t n = f.size();
  std::vector<double> pos(n), neg(n), abs(n);
  const auto v = f.values();
  for (std::size_t i = 0; i < n; ++i) {
    pos[i] = std::max(v[i], 0.0);
    neg[i] = std::max(-v[i], 0.0);
    abs[i] = pos[i] + neg[i];
  }
  return {GridFunction(f.grid(), std::move(pos)), GridFunction(f.grid(), std::move(neg)),
          GridFunction(f.grid(), std::move(abs))};
}

GridFunction add(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  require_finite(f, "add");
  require_finite(g, "add");
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.value(i) + g.value(i);
  return GridFunction(f.grid(), std::move(out));
}

GridFunction subtract(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  require_finite(f, "subtract");
  require_finite(g, "subtract");
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.value(i) - g.value(i);
  return GridFunction(f.grid(), std::move(out));
}

GridFunction scale(double c, const GridFunction& f) {
  require_finite(f, "scale");
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * f.value(i);
  return GridFunction(f.grid(), std::move(out));
}

void ExactSum::add(double x) {
  std::size_t i = 0;
  for (double y : partials_) {
    if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[i++] = lo;
    x = hi;
  }
  partials_.resize(i);
  partials_.push_back(x);
}

double ExactSum::value() const {
  if (partials_.empty()) return 0.0;
  // partials_ is nonoverlapping and increasing in magnitude; sum from the top
  // until the remainder is inexact, then correct a half-way rounding.
  std::size_t n = partials_.size();
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials_[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    const double yr = x - hi;
    if (y == yr) hi = x;
  }
  return hi;
}

double exact_sum(std::span<const double> values) {
  ExactSum s;
  for (double v : values) s.add(v);
  return s.value();
}

namespace {

template <class Pointwise>
double reduce(const GridFunction& f, Norm which, Pointwise&& magnitude) {
  double acc = 0.0;
  if (which == Norm::Sup) {
    for (std::size_t i = 0; i < f.size(); ++i) acc = std::max(acc, magnitude(i));
    return acc;
  }
  ExactSum sum;
  for (std::size_t i = 0; i < f.size(); ++i) sum.add(magnitude(i));
  return f.grid().cell_volume() * sum.value();
}

}  // namespace

double norm_l1(const GridFunction& f) { return norm(f, Norm::L1); }
double norm_sup(const GridFunction& f) { return norm(f, Norm::Sup); }

double norm(const GridFunction& f, Norm which) {
  require_finite(f, "norm");
  return reduce(f, which, [&](std::size_t i) { return std::fabs(f.value(i)); });
}

double dist(const GridFunction& f, const GridFunction& g, Norm which) {
  require_same_grid(f, g);
  require_finite(f, "dist");
  require_finite(g, "dist");
  return reduce(f, which, [&](std::size_t i) { return std::fabs(f.value(i) - g.value(i)); });
}

double dist_via_max(const GridFunction& f, const GridFunction& g, Norm which) {
  require_same_grid(f, g);
  require_finite(f, "dist");
  require_finite(g, "dist");
  return reduce(f, which, [&](std::size_t i) {
    const double a = f.value(i);
    const double b = g.value(i);
    const double m = a < b ? b : a;
    // 2m - a - b, grouped so that one of the two differences is exactly zero
    return (m - a) + (m - b);
  });
}

double positive_part_norm(const GridFunction& f, const GridFunction& g, Norm which) {
  require_same_grid(f, g);
  require_finite(f, "positive_part_norm");
  require_finite(g, "positive_part_norm");
  return reduce(f, which, [&](std::size_t i) { return std::max(f.value(i) - g.value(i), 0.0); });
}

}  // namespace mpsg
