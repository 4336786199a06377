#include "mpsg/samples.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mpsg {

SampleGenerator::SampleGenerator(std::uint64_t seed, SampleOptions options)
    : engine_(seed), options_(std::move(options)) {
  if (options_.families.empty()) options_.families = SampleOptions{}.families;
  if (options_.pieces < 1) options_.pieces = 1;
}

double SampleGenerator::uniform(double lo, double hi) {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double SampleGenerator::dyadic(double lo, double hi, int bits) {
  const double step = std::ldexp(1.0, -bits);
  const double k_lo = std::ceil(lo / step);
  const double k_hi = std::floor(hi / step);
  const double k = std::floor(uniform(k_lo, k_hi + 1.0));
  return std::min(k, k_hi) * step;
}

std::vector<double> SampleGenerator::line_values(const Axis& axis, SampleFamily family) {
  const double amp = options_.amplitude;
  const double len = axis.hi - axis.lo;
  std::vector<double> v(axis.n);
  switch (family) {
    case SampleFamily::SmoothBump: {
      const double base = uniform(-0.5 * amp, 0.5 * amp);
      const double height = uniform(-amp, amp) * 0.5;
      const double width = uniform(0.08, 0.25) * len;
      if (axis.periodic) {
        // periodic bump exp(k (cos - 1)) keeps the sample smooth across the seam
        const double phase = uniform(0.0, 2.0 * std::numbers::pi);
        const double k = std::pow(len / (2.0 * std::numbers::pi * width), 2.0);
        for (std::size_t i = 0; i < axis.n; ++i) {
          const double theta = 2.0 * std::numbers::pi * (axis.center(i) - axis.lo) / len - phase;
          v[i] = base + height * std::exp(k * (std::cos(theta) - 1.0));
        }
      } else {
        const double center = uniform(axis.lo + 0.2 * len, axis.hi - 0.2 * len);
        for (std::size_t i = 0; i < axis.n; ++i) {
          const double s = (axis.center(i) - center) / width;
          v[i] = base + height * std::exp(-s * s);
        }
      }
      break;
    }
    case SampleFamily::PiecewiseConstant: {
      std::vector<double> cuts(options_.pieces - 1);
      for (auto& c : cuts) c = uniform(axis.lo, axis.hi);
      std::sort(cuts.begin(), cuts.end());
      std::vector<double> levels(options_.pieces);
      for (auto& l : levels) l = uniform(-amp, amp);
      for (std::size_t i = 0; i < axis.n; ++i) {
        const double x = axis.center(i);
        const auto piece = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
        v[i] = levels[piece];
      }
      break;
    }
    case SampleFamily::PiecewiseLinear: {
      const std::size_t knots = options_.pieces + 1;
      std::vector<double> kv(knots);
      for (auto& k : kv) k = uniform(-amp, amp);
      if (axis.periodic) kv.back() = kv.front();
      const double h = len / static_cast<double>(knots - 1);
      for (std::size_t i = 0; i < axis.n; ++i) {
        const double s = (axis.center(i) - axis.lo) / h;
        const auto k = std::min(static_cast<std::size_t>(s), knots - 2);
        const double w = s - static_cast<double>(k);
        v[i] = kv[k] + w * (kv[k + 1] - kv[k]);
      }
      break;
    }
  }
  return v;
}

GridFunction SampleGenerator::of_family(const Grid& grid, SampleFamily family) {
  const auto vx = line_values(grid.axis(0), family);
  if (grid.dim() == 1) return GridFunction(grid, vx);
  const auto vy = line_values(grid.axis(1), family);
  std::vector<double> v(grid.size());
  const std::size_t ny = grid.axis(1).n;
  for (std::size_t i = 0; i < vx.size(); ++i)
    for (std::size_t j = 0; j < ny; ++j) v[i * ny + j] = 0.5 * (vx[i] + vy[j]);
  return GridFunction(grid, std::move(v));
}

GridFunction SampleGenerator::smooth_bump(const Grid& grid) { return of_family(grid, SampleFamily::SmoothBump); }
GridFunction SampleGenerator::piecewise_constant(const Grid& grid) {
  return of_family(grid, SampleFamily::PiecewiseConstant);
}
GridFunction SampleGenerator::piecewise_linear(const Grid& grid) {
  return of_family(grid, SampleFamily::PiecewiseLinear);
}

GridFunction SampleGenerator::function(const Grid& grid) {
  const auto family = options_.families[next_family_ % options_.families.size()];
  ++next_family_;
  return of_family(grid, family);
}

GridFunction SampleGenerator::dyadic_function(const Grid& grid, int bits) {
  std::vector<double> v(grid.size());
  for (auto& x : v) x = dyadic(-options_.amplitude, options_.amplitude, bits);
  return GridFunction(grid, std::move(v));
}

FunctionPair SampleGenerator::pair(const Grid& grid) {
  auto f = function(grid);
  auto g = function(grid);
  return {std::move(f), std::move(g)};
}

FunctionPair SampleGenerator::ordered_pair(const Grid& grid) {
  auto f = function(grid);
  auto bump = function(grid);
  // shift the second draw to be nonnegative, then scale it down
  const auto b = bump.values();
  const double lo = *std::min_element(b.begin(), b.end());
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = f.value(i) + 0.5 * (b[i] - lo);
  return {std::move(f), GridFunction(grid, std::move(g))};
}

std::vector<GridFunction> SampleGenerator::functions(const Grid& grid, std::size_t count) {
  std::vector<GridFunction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(function(grid));
  return out;
}

std::vector<FunctionPair> SampleGenerator::pairs(const Grid& grid, std::size_t count) {
  std::vector<FunctionPair> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(pair(grid));
  return out;
}

std::vector<FunctionPair> SampleGenerator::ordered_pairs(const Grid& grid, std::size_t count) {
  std::vector<FunctionPair> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(ordered_pair(grid));
  return out;
}

}  // namespace mpsg
