#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "mpsg/grid.hpp"

namespace mpsg {

using FunctionPair = std::pair<GridFunction, GridFunction>;

enum class SampleFamily { SmoothBump, PiecewiseConstant, PiecewiseLinear };

struct SampleOptions {
  double amplitude = 1.0;
  /// Knot count for the piecewise families.
  std::size_t pieces = 8;
  /// Families cycled through by SampleGenerator::function().
  std::vector<SampleFamily> families{SampleFamily::SmoothBump, SampleFamily::PiecewiseConstant,
                                     SampleFamily::PiecewiseLinear};
};

/// Seeded sample families. Output depends only on the seed and the call
/// sequence: the engine is std::mt19937_64, whose output sequence is fixed by
/// the standard, and the conversion to doubles is done here rather than by a
/// library distribution.
class SampleGenerator {
 public:
  explicit SampleGenerator(std::uint64_t seed, SampleOptions options = {});

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform on the dyadic lattice 2^-bits * Z within [lo, hi]; sums and
  /// differences of such values are exact in double precision.
  double dyadic(double lo, double hi, int bits = 20);

  /// 1-D families; 2-D grids get tensor products of two 1-D draws.
  GridFunction smooth_bump(const Grid& grid);
  GridFunction piecewise_constant(const Grid& grid);
  GridFunction piecewise_linear(const Grid& grid);
  GridFunction of_family(const Grid& grid, SampleFamily family);
  /// Next function, cycling through options().families.
  GridFunction function(const Grid& grid);
  /// Random function with dyadic values in [-amplitude, amplitude].
  GridFunction dyadic_function(const Grid& grid, int bits = 20);

  /// Two independent draws; they cross generically.
  FunctionPair pair(const Grid& grid);
  /// (f, g) with f <= g pointwise: g = f + a nonnegative draw.
  FunctionPair ordered_pair(const Grid& grid);

  std::vector<GridFunction> functions(const Grid& grid, std::size_t count);
  std::vector<FunctionPair> pairs(const Grid& grid, std::size_t count);
  std::vector<FunctionPair> ordered_pairs(const Grid& grid, std::size_t count);

  const SampleOptions& options() const noexcept { return options_; }

 private:
  std::vector<double> line_values(const Axis& axis, SampleFamily family);

  std::mt19937_64 engine_;
  SampleOptions options_;
  std::size_t next_family_ = 0;
};

}  // namespace mpsg
