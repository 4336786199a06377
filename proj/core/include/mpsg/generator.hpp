#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpsg/grid.hpp"
#include "mpsg/semigroup.hpp"

namespace mpsg {

/// Estimate of A f = lim_{t -> 0} (T(t)f - f)/t. Cells whose extrapolants
/// fail the Cauchy test are masked: af holds bottom there.
struct GeneratorEstimate {
  GridFunction af;
  std::vector<bool> masked;
  double t_used = 0.0;
  int richardson_order = 0;

  double mask_fraction() const;
};

struct GeneratorOptions {
  /// Degree of the polynomial in t fitted through consecutive quotients.
  int richardson_order = 1;
  /// A cell passes when the last two extrapolants differ by at most
  /// cauchy_tol * max(|E_last(x)|, sup |E_last|).
  double cauchy_tol = 1e-3;
};

/// t_seq must be strictly decreasing, positive, and hold at least
/// richardson_order + 2 entries. f must be finite.
GeneratorEstimate generator_estimate(const SemigroupOperator& op, const GridFunction& f, std::span<const double> t_seq,
                                     GeneratorOptions options = {});

/// Sup distance between the estimates for a (x) f and f over cells unmasked
/// in both; +inf when the masks differ.
double check_translation_invariance(const SemigroupOperator& op, const GridFunction& f, double a,
                                    std::span<const double> t_seq, GeneratorOptions options = {});

/// One row of `operator,f_label,t_min,order,sup_error,domain_mask_fraction`.
struct GeneratorReport {
  std::string operator_label;
  std::string f_label;
  double t_min = 0.0;
  int order = 0;
  double sup_error = 0.0;
  double mask_fraction = 0.0;
};

std::string generator_csv_header();
std::string to_csv_row(const GeneratorReport& report);

/// Sup error of an estimate against exact values over unmasked cells.
double generator_sup_error(const GeneratorEstimate& est, const GridFunction& exact);

/// Left translation on a periodic grid with f = e^{-2x^2} <= g = e^{-x^2}:
/// A(f (+) g) = Ag = g', yet Af (+) Ag exceeds Ag where f' > g'.
struct CounterexampleReport {
  std::size_t n = 0;
  double t_min = 0.0;
  /// f <= g at every node.
  bool ordered = false;
  /// f (+) g reproduces g bit for bit, so A(f (+) g) = Ag.
  bool join_is_g = false;
  /// Node nearest -0.25, with the measured gap (Af (+) Ag)(x) - Ag(x) and
  /// the same quantity from the exact derivatives at that node.
  double witness_x = 0.0;
  double witness_af = 0.0;
  double witness_ag = 0.0;
  double gap = 0.0;
  double analytic_gap = 0.0;
  /// Largest measured gap over the grid.
  double max_gap_x = 0.0;
  double max_gap = 0.0;
};

CounterexampleReport generator_max_additivity_counterexample(std::size_t n = 2049, double t_min = 1e-3,
                                                             Interval domain = {-4.0, 4.0});

/// A_h u = (step(u) - u) / dt, the scheme's own discrete generator.
struct DiscreteGenerator {
  std::string label;
  std::function<GridFunction(const GridFunction&)> step;
  double dt = 0.0;

  GridFunction apply(const GridFunction& u) const;
};

DiscreteGenerator discrete_generator(const SemigroupOperator& op, double dt);

struct ResolventOptions {
  std::size_t max_iterations = 20000;
  /// Stop when successive iterates differ by at most tol * max(1, ||u||) in sup norm.
  double tol = 1e-14;
};

/// Solves u - alpha A_h u = g by the fixed-point map
/// u <- (g + lambda step(u)) / (1 + lambda), lambda = alpha / dt, which is a
/// strict contraction whenever step is sup-nonexpansive. Empty on
/// non-convergence. Throws std::invalid_argument unless alpha > 0.
std::optional<GridFunction> resolvent_solve(const DiscreteGenerator& gen, double alpha, const GridFunction& g,
                                            ResolventOptions options = {});

/// Sampled Lipschitz estimate of g -> (I - alpha A_h)^{-1} g in the native
/// norm. EXACT when <= 1 + tol, VIOLATED above, UNKNOWN if any solve fails to
/// converge. The report's t field carries alpha.
PropertyReport dissipativity_probe(const SemigroupOperator& op, const DiscreteGenerator& gen, double alpha,
                                   std::span<const FunctionPair> pairs, double tol = 1e-8,
                                   ResolventOptions options = {});

}  // namespace mpsg
