#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpsg/max_scalar.hpp"
#include "mpsg/semigroup.hpp"

namespace mpsg {

// -- operator constructions --------------------------------------------------
//
// Every construction checks its hypothesis on samples and throws
// ConstructionRefused when the check fails.

enum class RescaleVariant { Additive, Multiplicative };

std::string_view to_string(RescaleVariant v) noexcept;
RescaleVariant parse_rescale_variant(std::string_view s);

/// Additive: S(t)f = (beta t) (x) T(alpha t)f.
/// Multiplicative: S(t)f = e^{beta t} * T(alpha t)f, ordinary scaling, which
/// is not the max-plus scalar action and so breaks plus-homogeneity.
/// Throws std::invalid_argument unless alpha > 0.
SemigroupOperator rescale(const SemigroupOperator& op, double alpha, double beta,
                          RescaleVariant variant = RescaleVariant::Additive);

/// Largest commutation defect ||T(t)U(t)f - U(t)T(t)f|| over samples and
/// times, in T's native norm.
double commutation_defect(const SemigroupOperator& op_t, const SemigroupOperator& op_u,
                          std::span<const GridFunction> samples, std::span<const double> t_list);

/// S(t) = T(t) U(t). Refused when the commutation defect exceeds
/// tolerance * max(1, ||samples||).
SemigroupOperator product(const SemigroupOperator& op_t, const SemigroupOperator& op_u,
                          std::span<const GridFunction> commutation_samples, std::span<const double> t_list,
                          double tolerance = 1e-12);

using Predicate = std::function<bool(const GridFunction&)>;

struct NamedPredicate {
  std::string name;
  Predicate test;
};

/// Second differences <= tol * max(1, ||f||_sup).
NamedPredicate concave_predicate(double tol = 1e-12);
NamedPredicate bounded_above_predicate(double c);
NamedPredicate nonnegative_predicate();

/// Same evolve, restricted to the class: evolve throws std::invalid_argument
/// on inputs failing the predicate. Refused when a sample is outside the
/// class or some T(t) sample leaves it.
SemigroupOperator restrict(const SemigroupOperator& op, const NamedPredicate& predicate,
                           std::span<const GridFunction> invariance_samples, std::span<const double> t_list);

using GridMap = std::function<GridFunction(const GridFunction&)>;

/// Cell reversal x -> -x about the grid midpoint (1-D).
GridFunction reflect(const GridFunction& f);

/// S(t) = Vinv T(t) V. Refused unless V and Vinv are inverse to each other on
/// the samples (to tol * max(1, ||f||_sup)) and map finite to finite.
SemigroupOperator conjugate(const SemigroupOperator& op, GridMap v, GridMap v_inv,
                            std::span<const GridFunction> samples, double tol = 1e-12);

// -- finite-dimensional quotient ---------------------------------------------

class FiniteMaxVector {
 public:
  /// Throws std::invalid_argument when empty.
  explicit FiniteMaxVector(std::vector<MaxScalar> entries);
  static FiniteMaxVector bottom(std::size_t n);
  static FiniteMaxVector from_doubles(std::span<const double> values);

  std::size_t size() const noexcept { return entries_.size(); }
  MaxScalar operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<MaxScalar>& entries() const noexcept { return entries_; }

  friend bool operator==(const FiniteMaxVector&, const FiniteMaxVector&) = default;

 private:
  std::vector<MaxScalar> entries_;
};

FiniteMaxVector vec_oplus(const FiniteMaxVector& a, const FiniteMaxVector& b);
FiniteMaxVector vec_otimes(MaxScalar c, const FiniteMaxVector& a);
bool vec_leq(const FiniteMaxVector& a, const FiniteMaxVector& b);

/// Columns of a generator family D.
class FiniteSubspace {
 public:
  /// Throws std::invalid_argument on an empty list or unequal lengths.
  explicit FiniteSubspace(std::vector<FiniteMaxVector> generators);

  std::size_t dimension() const noexcept { return generators_.front().size(); }
  std::size_t rank() const noexcept { return generators_.size(); }
  const std::vector<FiniteMaxVector>& generators() const noexcept { return generators_; }

  /// D (x) a = (+)_j a_j (x) d_j.
  FiniteMaxVector combine(std::span<const MaxScalar> coefficients) const;
  /// Greatest a with D (x) a <= w; coefficients of all-bottom generators are bottom.
  std::vector<MaxScalar> residuate(const FiniteMaxVector& w) const;
  /// Rows where some generator is finite.
  std::vector<bool> support() const;

 private:
  std::vector<FiniteMaxVector> generators_;
};

/// Square max-plus matrix acting on FiniteMaxVector.
class MaxPlusMatrix {
 public:
  MaxPlusMatrix(std::size_t n, std::vector<MaxScalar> row_major);
  static MaxPlusMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  MaxScalar at(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  FiniteMaxVector apply(const FiniteMaxVector& x) const;

 private:
  std::size_t n_;
  std::vector<MaxScalar> entries_;
};

enum class QuotientStatus { Equivalent, NotEquivalent, Unknown };
std::string_view to_string(QuotientStatus s) noexcept;

struct QuotientResult {
  QuotientStatus status = QuotientStatus::Unknown;
  /// Set for Equivalent: f1 (+) D a = f2 (+) D b, verified bit for bit.
  std::vector<MaxScalar> a;
  std::vector<MaxScalar> b;
  std::optional<FiniteMaxVector> g1;
  std::optional<FiniteMaxVector> g2;
  std::size_t iterations = 0;
};

/// Decides f1 ~ f2 (exists g1, g2 in span D with f1 (+) g1 = f2 (+) g2) by
/// alternating residuation on [f1 | D](0, a) = [f2 | D](0, b), started from
/// coefficients large enough to dominate every finite entry. The iterates
/// decrease monotonically; failure of f2 <= w or f1 <= v certifies
/// non-equivalence. Returns Unknown at the iteration cap.
QuotientResult quotient_equivalent(const FiniteMaxVector& f1, const FiniteMaxVector& f2, const FiniteSubspace& d,
                                   std::size_t max_iterations = 1000);

/// T (x) rep as the representative of the image class. Throws
/// ConstructionRefused unless every T (x) d_j is equivalent to bottom, i.e.
/// D is T-invariant up to ~.
FiniteMaxVector quotient_apply(const MaxPlusMatrix& t, const FiniteMaxVector& rep, const FiniteSubspace& d,
                               std::size_t max_iterations = 1000);

/// Whitespace-separated entries, `-inf` for bottom.
FiniteMaxVector parse_finite_vector(std::string_view line);
std::string to_string(const FiniteMaxVector& v);
/// One generator per non-blank, non-comment line.
FiniteSubspace read_subspace(std::istream& in);
void write_subspace(std::ostream& out, const FiniteSubspace& d);

}  // namespace mpsg
