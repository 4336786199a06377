#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mpsg/grid.hpp"
#include "mpsg/semigroup.hpp"

namespace mpsg {

/// Flux f of u_t + f(u)_x = 0.
struct FluxFunction {
  std::string name;
  std::function<double(double)> f;
  /// Upper bound on |f'| over an interval of states.
  std::function<double(Interval)> lipschitz_bound_on;
  /// For convex f: the global minimizer, which gives riemann_flux a closed form.
  std::optional<double> convex_minimizer;

  /// u^2 / 2.
  static FluxFunction burgers();
  /// c u.
  static FluxFunction linear(double c);
  /// Arbitrary continuous flux. The Lipschitz bound is the largest secant
  /// slope over 129 samples of the interval, padded by 10%.
  static FluxFunction general(std::string name, std::function<double(double)> f);
};

/// Godunov flux: min of f over [uL, uR] when uL <= uR, max over [uR, uL]
/// otherwise. Closed form for convex fluxes, 129-point sampling otherwise.
double riemann_flux(const FluxFunction& flux, double u_left, double u_right);

/// One conservative update on a periodic 1-D grid:
/// u_i' = u_i - (dt/dx)(F_{i+1/2} - F_{i-1/2}).
/// Throws CflViolation when dt * Lip(f on range u) > dx, BottomValueError on
/// bottom entries.
GridFunction godunov_step(const FluxFunction& flux, const GridFunction& u, double dt);

/// Entropy solution at time t with automatic substepping at the given CFL
/// number (the step depends on the range of h). All-bottom input is returned
/// unchanged; partially bottom input is rejected.
GridFunction evolve_cl(const FluxFunction& flux, const GridFunction& h, double t, double cfl = 0.9);

/// Godunov semigroup with one step size for every input: dt is fixed by the
/// flux speed over state_range, so different initial data are advanced by
/// the same discrete map. Inputs outside state_range are rejected.
SemigroupOperator make_godunov(const FluxFunction& flux, Interval state_range, double cfl = 0.9);

/// dx * sum u_i, the signed integral, summed exactly.
double mass_integral(const GridFunction& u);

// -- trajectories ------------------------------------------------------------

/// Time-indexed snapshots on one grid.
struct Trajectory {
  std::vector<double> times;
  std::vector<GridFunction> snapshots;

  std::size_t size() const noexcept { return times.size(); }
  const Grid& grid() const { return snapshots.front().grid(); }
};

/// Snapshots after each of `steps` equal Godunov steps to t_end (plus t=0).
Trajectory cl_trajectory(const FluxFunction& flux, const GridFunction& h, double t_end, std::size_t steps);

/// Samples fn(t, x) at every snapshot time and cell of `like`.
Trajectory sample_on(const Trajectory& like, const std::function<double(double, double)>& fn);

/// psi(t, x) = b((t - tc)/rt) b((x - xc)/rx) with b(s) = (1 - s^2)^3 on |s| < 1.
std::function<double(double, double)> bump_test_function(double tc, double rt, double xc, double rx);

/// Discrete Kruzkov functional
///   sum_m sum_i [ |v_i^m - k| (psi_i^{m+1} - psi_i^m)
///                 + dt_m q(v_i^m) (psi_{i+1}^m - psi_{i-1}^m) / (2 dx) ] dx,
/// q(v) = (f(v) - f(k)) sgn(v - k). Entropy solutions give values >= -O(dx).
/// psi must be nonnegative and vanish on the first and last snapshot; off a
/// periodic grid it is taken as zero.
double kruzkov_residual(const FluxFunction& flux, const Trajectory& trajectory, double k, const Trajectory& psi);

/// Records of `t <time>` followed by a GridFunction record.
void write_trajectory(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory(std::istream& in);
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory(const std::filesystem::path& path);

}  // namespace mpsg
