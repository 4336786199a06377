#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mpsg/grid.hpp"
#include "mpsg/samples.hpp"

namespace mpsg {

/// A one-parameter family (T(t))_{t>=0} acting on grid functions.
///
/// evolve() enforces the invariants shared by every operator: t >= 0,
/// T(0) = Id bit for bit, and the output lives on the input grid.
class SemigroupOperator {
 public:
  using EvolveFn = std::function<GridFunction(double t, const GridFunction& f)>;

  SemigroupOperator(std::string label, Norm native_norm, EvolveFn evolve);

  GridFunction evolve(double t, const GridFunction& f) const;

  const std::string& label() const noexcept { return label_; }
  Norm native_norm() const noexcept { return native_norm_; }

 private:
  std::string label_;
  Norm native_norm_;
  std::shared_ptr<const EvolveFn> evolve_;
};

/// T(t) = Id for every t.
SemigroupOperator identity_semigroup(Norm native_norm = Norm::Sup);

enum class Direction { Left, Right };

/// f(x + shift) on a periodic 1-D grid: a circular index shift, with linear
/// interpolation when shift is not a whole number of cells. Shifts within
/// 1e-9 cells of a whole number are snapped to it.
GridFunction translate(const GridFunction& f, double shift);

/// Left: T(t)f(x) = f(x + t). Right: T(t)f(x) = f(x - t). Periodic grids only.
SemigroupOperator make_translation(Direction direction);

// -- property harness --------------------------------------------------------

enum class Property {
  MaxAdditivity,
  PlusHomogeneity,
  Monotonicity,
  SemigroupLaw,
  StrongContinuity,
  Contraction,
  IsometryL1,
  Dissipativity,
};

/// EXACT: defect at roundoff level. WITHIN_SCHEME_ERROR: above roundoff but
/// inside the discretization budget. VIOLATED: above the budget. UNKNOWN: the
/// measurement itself did not complete (e.g. an iteration cap).
enum class Verdict { Exact, WithinSchemeError, Violated, Unknown };

std::string_view to_string(Property p) noexcept;
std::string_view to_string(Verdict v) noexcept;
Property parse_property(std::string_view s);
Verdict parse_verdict(std::string_view s);

struct ErrorBudget {
  /// EXACT threshold, relative to the sample scale.
  double exact_relative = 1e-12;
  /// Scheme-error budget is scheme_constant * dx * scale.
  double scheme_constant = 1.0;
  /// A refinement level counts as shrinking when defect(2n) <= shrink_factor * defect(n).
  double shrink_factor = 0.9;
};

Verdict classify(double defect, double scale, double dx, const ErrorBudget& budget);

struct PropertyReport {
  Property property = Property::MaxAdditivity;
  std::string operator_label;
  double t = 0.0;
  Norm norm = Norm::Sup;
  double defect = 0.0;
  std::size_t samples = 0;
  Verdict verdict = Verdict::Exact;
  std::string details;
  /// max(1, largest native norm among the inputs).
  double scale = 1.0;
};

/// `property,operator,t,norm,defect,samples,verdict`
std::string property_csv_header();
std::string to_csv_row(const PropertyReport& report);

/// max over pairs of ||T(t)f - T(t)g|| / ||f - g||: a sampled lower bound on
/// the Lipschitz seminorm. Throws on an empty set or an f == g pair.
double lip_seminorm_estimate(const SemigroupOperator& op, double t, std::span<const FunctionPair> pairs, Norm norm);

PropertyReport defect_max_additivity(const SemigroupOperator& op, double t, std::span<const FunctionPair> pairs,
                                     const ErrorBudget& budget = {});
PropertyReport defect_plus_homogeneity(const SemigroupOperator& op, double t, MaxScalar a,
                                       std::span<const GridFunction> samples, const ErrorBudget& budget = {});
/// Pairs must satisfy f <= g; throws std::invalid_argument otherwise.
PropertyReport defect_monotonicity(const SemigroupOperator& op, double t, std::span<const FunctionPair> ordered,
                                   const ErrorBudget& budget = {});
PropertyReport defect_semigroup_law(const SemigroupOperator& op, double t, double s,
                                    std::span<const GridFunction> samples, const ErrorBudget& budget = {});
/// Verdict EXACT when every sampled Lipschitz estimate is <= e^{omega t} + tol,
/// VIOLATED otherwise; defect is the largest excess.
PropertyReport check_contraction(const SemigroupOperator& op, std::span<const double> t_list,
                                 std::span<const FunctionPair> pairs, double omega, const ErrorBudget& budget = {});
PropertyReport check_isometry_l1(const SemigroupOperator& op, double t, std::span<const FunctionPair> pairs,
                                 const ErrorBudget& budget = {});

/// (t, ||T(t)f - f||) for each t in t_list, native norm.
std::vector<std::pair<double, double>> continuity_modulus(const SemigroupOperator& op, const GridFunction& f,
                                                          std::span<const double> t_list);
/// Strong-continuity report built from the modulus: EXACT if every value is at
/// roundoff, WITHIN_SCHEME_ERROR if the modulus decreases with t, VIOLATED if not.
PropertyReport check_strong_continuity(const SemigroupOperator& op, const GridFunction& f,
                                       std::span<const double> t_list, const ErrorBudget& budget = {});

// -- refinement studies ------------------------------------------------------

struct RefinementLevel {
  std::size_t n = 0;
  double dx = 0.0;
  PropertyReport report;
};

struct RefinementStudy {
  Property property = Property::MaxAdditivity;
  std::string operator_label;
  std::vector<RefinementLevel> levels;
  Verdict verdict = Verdict::Exact;
};

/// Runs `level(grid)` on base, base refined x2, x4, ... and classifies:
/// EXACT if every level is EXACT; WITHIN_SCHEME_ERROR if the finest level is
/// within budget and the defect shrinks on the last refinement; VIOLATED
/// otherwise (a defect that does not shrink under n -> 2n is a property
/// failure, not discretization error).
RefinementStudy refinement_study(const Grid& base, std::size_t levels,
                                 const std::function<PropertyReport(const Grid&)>& level,
                                 const ErrorBudget& budget = {});

/// `property,operator,n,dx,t,norm,defect,level_verdict,study_verdict`
std::string convergence_csv_header();
std::vector<std::string> to_csv_rows(const RefinementStudy& study);

}  // namespace mpsg
