#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "mpsg/grid.hpp"
#include "mpsg/hamilton_jacobi.hpp"
#include "mpsg/semigroup.hpp"

namespace mpsg {

/// State or control vector; unused trailing components are zero.
using Point = std::array<double, 2>;

/// Finite-horizon reward maximization
///   maximize  int_0^T l(x, u) ds + phi(x(T)),   x' = f(x, u),  u in U,
/// with U replaced by a finite control sample.
struct ControlProblem {
  std::string name;
  Grid state_grid;
  std::vector<Point> controls;
  std::size_t control_dim = 1;
  std::function<Point(const Point& x, const Point& u)> dynamics;
  std::function<double(const Point& x, const Point& u)> running_reward;
  GridFunction terminal_reward;
  double horizon = 1.0;
  /// l and f do not depend on x, so the Hamiltonian depends on p only.
  bool state_independent = false;

  /// x' = u, l = reward - control_cost u^2 / 2, u sampled at `samples`
  /// equispaced points of `control_range` (1-D state).
  static ControlProblem integrator(const Grid& grid, GridFunction phi, double horizon,
                                   Interval control_range = {-1.0, 1.0}, std::size_t samples = 33,
                                   double reward = 0.0, double control_cost = 0.0);
  /// x = (position, velocity), x' = (velocity, u), l = -control_cost u^2 / 2
  /// (2-D state, 1-D control).
  static ControlProblem double_integrator(const Grid& grid, GridFunction phi, double horizon,
                                          Interval control_range = {-1.0, 1.0}, std::size_t samples = 33,
                                          double control_cost = 0.0);
  /// 1-D state-independent problem from rows (u, f(u), l(u)).
  static ControlProblem from_table(const Grid& grid, GridFunction phi, double horizon,
                                   const std::vector<std::array<double, 3>>& rows);
};

/// Throws std::invalid_argument on an empty control set, a terminal reward on
/// another grid, a non-positive horizon, or non-finite f / l at a sampled
/// (x, u).
void validate(const ControlProblem& problem);

/// H(x, p) = max over the control sample of l(x, u) + p . f(x, u).
double hamiltonian_eval(const ControlProblem& problem, const Point& x, const Point& p);

/// v'(x) = max_u [ dt l(x, u) + v(x + dt f(x, u)) ], v read by linear
/// (bilinear in 2-D) interpolation. Feet outside a non-periodic box are
/// clamped to the outermost cell centers; periodic axes wrap. An
/// interpolation stencil touching a bottom value with positive weight yields
/// bottom.
GridFunction dp_step(const ControlProblem& problem, const GridFunction& v, double dt);

struct DpOptions {
  /// dt = cfl * min cell width / max |f|; cfl = 1 moves feet at most one cell.
  double cfl = 1.0;
};

/// Iterated dp_step with equal steps no larger than the CFL step.
/// Throws std::invalid_argument for t outside [0, horizon].
GridFunction evolve_hjb(const ControlProblem& problem, const GridFunction& phi, double t, DpOptions options = {});
SemigroupOperator make_hjb(const ControlProblem& problem, DpOptions options = {});

/// p -> H(p) for a state-independent 1-D problem.
Hamiltonian induced_hamiltonian(const ControlProblem& problem, Interval p_range = {-8.0, 8.0});

/// Sup distance between evolve_hjb and Hopf-Lax driven by the conjugate of
/// the induced Hamiltonian, over cells where both are finite. Throws std::invalid_argument for x-dependent or
/// multi-dimensional problems.
double hj_consistency_check(const ControlProblem& problem, const GridFunction& phi, double t, DpOptions options = {},
                            Interval p_range = {-8.0, 8.0});

}  // namespace mpsg
