#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpsg/grid.hpp"
#include "mpsg/semigroup.hpp"

// Sign convention
// ---------------
// Everything here is in sup form, the orientation of the max-plus algebra
// and of the Bellman equation:
//
//   u_t = H(x, u_x),  u(0) = h                      (i.e. -u_t + H = 0)
//   (T(t)h)(x) = sup_y [ h(y) - t L((y - x)/t) ],   L = H* (Legendre conjugate)
//   generator:  A f = H(x, f')
//
// The textbook form u_t + F(u_x) = 0 is the case H = -F. The velocity
// argument is (y - x)/t so that a Lagrangian concentrated at q = c moves data
// as h(x + c t), which is what the control problem with dynamics x' = c
// produces. For even L the two orientations coincide.
//
// Worked case used throughout the tests: H(p) = p^2/2, h(x) = -x^2/2 gives
// u(t, x) = -x^2 / (2(1 + t)) and A h = x^2/2.

namespace mpsg {

/// q -> L(q), with +inf marking velocities outside the effective domain.
struct Lagrangian {
  std::string name;
  std::function<double(double)> L;
  Interval effective_domain;

  /// q^2 / 2, conjugate of p^2 / 2.
  static Lagrangian quadratic();
  /// 0 on [-1, 1], +inf outside; conjugate of |p|.
  static Lagrangian unit_speed();
};

/// L(q) = max over `resolution` equispaced p in p_range of (p q - H(p)). A
/// maximum attained only at an end of the p-range is reported as +inf (the
/// sup is unbounded there). Throws std::invalid_argument when a sampled
/// midpoint test finds H non-convex.
Lagrangian legendre_transform(std::function<double(double)> h_of_p, Interval p_range, std::size_t resolution = 2049);

struct Hamiltonian {
  std::string name;
  std::function<double(double x, double p)> H;
  /// Bound on |dH/dp| over |p| <= pmax (and every x).
  std::function<double(double pmax)> p_lipschitz_bound;
  bool state_independent = true;
  bool convex = true;
  /// p-range used when the conjugate has to be computed numerically.
  Interval p_range{-8.0, 8.0};
  /// Closed-form conjugate, when known.
  std::optional<Lagrangian> conjugate;

  static Hamiltonian quadratic();
  static Hamiltonian abs_value();
  /// Piecewise-linear interpolation of sampled (p, H(p)) pairs, extended
  /// linearly beyond the table. Convexity is read off the slopes.
  static Hamiltonian from_table(std::vector<std::pair<double, double>> table);
};

/// Exact discrete Hopf-Lax formula on a non-periodic 1-D grid: the sup runs
/// over grid nodes, terms with L = +inf or h = bottom drop out. t = 0 returns
/// h; an all-bottom h gives all-bottom output.
GridFunction hopf_lax_evolve(const Lagrangian& lagrangian, const GridFunction& h, double t);

/// Hopf-Lax semigroup with a kernel cache shared by every copy.
SemigroupOperator make_hopf_lax(const Lagrangian& lagrangian);

/// u_i' = u_i + dt [ H(x_i, D0 u) + alpha (u_{i+1} - 2u_i + u_{i-1}) / (2 dx) ].
/// Periodic grids wrap, others extrapolate constantly. With `enforce`, throws
/// CflViolation unless dt alpha / dx <= 1/2 and alpha bounds |dH/dp| over the
/// central differences of u, which makes the step monotone.
GridFunction lax_friedrichs_step(const Hamiltonian& hamiltonian, const GridFunction& u, double dt,
                                 double artificial_viscosity, bool enforce = true);

struct LaxFriedrichsOptions {
  double artificial_viscosity = 1.0;
  /// dt = cfl * dx / alpha; the monotone range is cfl <= 1/2.
  double cfl = 0.45;
  bool enforce_monotonicity = true;
};

SemigroupOperator make_lax_friedrichs(const Hamiltonian& hamiltonian, LaxFriedrichsOptions options);

/// Hopf-Lax for state-independent convex H (using the closed-form conjugate
/// when present), Lax-Friedrichs otherwise with alpha sized from h.
GridFunction evolve_hj(const Hamiltonian& hamiltonian, const GridFunction& h, double t);
/// Same dispatch as an operator; the Lax-Friedrichs path uses `lf` so that
/// every input is advanced by the same discrete map.
SemigroupOperator make_hj(const Hamiltonian& hamiltonian, LaxFriedrichsOptions lf = {});

/// Lipschitz bound of u from one-sided differences (1-D).
double max_slope(const GridFunction& u);

}  // namespace mpsg
