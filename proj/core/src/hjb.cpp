#include "mpsg/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "mpsg/errors.hpp"

namespace mpsg {

namespace {

constexpr double kBottom = -std::numeric_limits<double>::infinity();

std::vector<Point> sample_controls(Interval range, std::size_t samples) {
  if (samples == 0 || !(range.hi >= range.lo)) throw std::invalid_argument("control sample: empty control set");
  std::vector<Point> u;
  if (samples == 1) return {Point{0.5 * (range.lo + range.hi), 0.0}};
  for (std::size_t k = 0; k < samples; ++k)
    u.push_back({range.lo + range.length() * static_cast<double>(k) / static_cast<double>(samples - 1), 0.0});
  u.back()[0] = range.hi;
  return u;
}

struct Stencil {
  std::size_t k0 = 0;
  std::size_t k1 = 0;
  double w = 0.0;  // weight of k1
};

Stencil locate(const Axis& axis, double y) {
  const double h = axis.width();
  double s = (y - axis.center(0)) / h;
  const auto n = static_cast<double>(axis.n);
  if (axis.periodic) {
    s = std::fmod(s, n);
    if (s < 0) s += n;
  } else {
    s = std::clamp(s, 0.0, n - 1.0);
  }
  const double nearest = std::round(s);
  if (std::fabs(s - nearest) < 1e-9) s = nearest;
  double k = std::floor(s);
  if (k >= n) k -= n;  // fmod rounding up to n
  Stencil st;
  st.k0 = static_cast<std::size_t>(k);
  st.w = s - std::floor(s);
  if (st.w == 0.0) {
    st.k1 = st.k0;
  } else {
    st.k1 = st.k0 + 1 == axis.n ? 0 : st.k0 + 1;
  }
  return st;
}

double lerp(double a, double b, double w) {
  if (w == 0.0) return a;
  if (std::isinf(a) || std::isinf(b)) return kBottom;
  return a + w * (b - a);
}

double interpolate(const GridFunction& v, const Point& y) {
  const Grid& g = v.grid();
  const auto vals = v.values();
  const Stencil sx = locate(g.axis(0), y[0]);
  if (g.dim() == 1) return lerp(vals[sx.k0], sx.w == 0.0 ? 0.0 : vals[sx.k1], sx.w);
  const std::size_t ny = g.axis(1).n;
  const Stencil sy = locate(g.axis(1), y[1]);
  auto along_y = [&](std::size_t i) {
    return lerp(vals[i * ny + sy.k0], sy.w == 0.0 ? 0.0 : vals[i * ny + sy.k1], sy.w);
  };
  const double a = along_y(sx.k0);
  return lerp(a, sx.w == 0.0 ? 0.0 : along_y(sx.k1), sx.w);
}

/// max over (x, u) of max_d |f_d| / width_d.
double max_cell_rate(const ControlProblem& p) {
  const Grid& g = p.state_grid;
  double rate = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.point(k);
    for (const Point& u : p.controls) {
      const Point f = p.dynamics(x, u);
      for (std::size_t d = 0; d < g.dim(); ++d) rate = std::max(rate, std::fabs(f[d]) / g.axis(d).width());
    }
  }
  return rate;
}

}  // namespace

ControlProblem ControlProblem::integrator(const Grid& grid, GridFunction phi, double horizon, Interval control_range,
                                          std::size_t samples, double reward, double control_cost) {
  ControlProblem p{"integrator", grid, sample_controls(control_range, samples), 1,
                   [](const Point&, const Point& u) { return Point{u[0], 0.0}; },
                   [reward, control_cost](const Point&, const Point& u) { return reward - 0.5 * control_cost * u[0] * u[0]; },
                   std::move(phi), horizon, true};
  validate(p);
  return p;
}

ControlProblem ControlProblem::double_integrator(const Grid& grid, GridFunction phi, double horizon,
                                                 Interval control_range, std::size_t samples, double control_cost) {
  if (grid.dim() != 2) throw std::invalid_argument("double-integrator: needs a 2-D state grid");
  ControlProblem p{"double-integrator", grid, sample_controls(control_range, samples), 1,
                   [](const Point& x, const Point& u) { return Point{x[1], u[0]}; },
                   [control_cost](const Point&, const Point& u) { return -0.5 * control_cost * u[0] * u[0]; },
                   std::move(phi), horizon, false};
  validate(p);
  return p;
}

ControlProblem ControlProblem::from_table(const Grid& grid, GridFunction phi, double horizon,
                                          const std::vector<std::array<double, 3>>& rows) {
  if (rows.empty()) throw std::invalid_argument("control table: empty control set");
  // The control value itself is irrelevant once f and l are tabulated; the
  // row index is stored as the control.
  std::vector<Point> controls;
  for (std::size_t k = 0; k < rows.size(); ++k) controls.push_back({static_cast<double>(k), 0.0});
  auto table = std::make_shared<const std::vector<std::array<double, 3>>>(rows);
  ControlProblem p{"custom-table", grid, std::move(controls), 1,
                   [table](const Point&, const Point& u) { return Point{(*table)[static_cast<std::size_t>(u[0])][1], 0.0}; },
                   [table](const Point&, const Point& u) { return (*table)[static_cast<std::size_t>(u[0])][2]; },
                   std::move(phi), horizon, true};
  validate(p);
  return p;
}

void validate(const ControlProblem& p) {
  if (p.controls.empty()) throw std::invalid_argument(p.name + ": empty control set");
  if (!p.dynamics || !p.running_reward) throw std::invalid_argument(p.name + ": dynamics and reward are required");
  if (!(p.horizon > 0.0) || !std::isfinite(p.horizon)) throw std::invalid_argument(p.name + ": horizon must be > 0");
  if (!(p.terminal_reward.grid() == p.state_grid))
    throw std::invalid_argument(p.name + ": terminal reward lives on another grid");
  for (std::size_t k = 0; k < p.state_grid.size(); ++k) {
    const Point x = p.state_grid.point(k);
    for (const Point& u : p.controls) {
      const Point f = p.dynamics(x, u);
      if (!std::isfinite(f[0]) || !std::isfinite(f[1]) || !std::isfinite(p.running_reward(x, u)))
        throw std::invalid_argument(p.name + ": dynamics or reward not finite at a sampled (x, u)");
    }
  }
}

double hamiltonian_eval(const ControlProblem& problem, const Point& x, const Point& p) {
  if (problem.controls.empty()) throw std::invalid_argument(problem.name + ": empty control set");
  double best = kBottom;
  for (const Point& u : problem.controls) {
    const Point f = problem.dynamics(x, u);
    best = std::max(best, problem.running_reward(x, u) + p[0] * f[0] + p[1] * f[1]);
  }
  return best;
}

GridFunction dp_step(const ControlProblem& problem, const GridFunction& v, double dt) {
  if (!(v.grid() == problem.state_grid)) throw GridMismatch(problem.name + ": value function on another grid");
  if (!(dt > 0.0)) throw std::invalid_argument("dp_step: dt must be > 0");
  const Grid& g = v.grid();
  std::vector<double> out(g.size(), kBottom);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.point(k);
    double best = kBottom;
    for (const Point& u : problem.controls) {
      const Point f = problem.dynamics(x, u);
      const double tail = interpolate(v, Point{x[0] + dt * f[0], x[1] + dt * f[1]});
      if (std::isinf(tail)) continue;
      best = std::max(best, dt * problem.running_reward(x, u) + tail);
    }
    out[k] = best;
  }
  return GridFunction(g, std::move(out));
}

namespace {

GridFunction iterate_dp(const ControlProblem& problem, const GridFunction& phi, double t, double rate,
                        DpOptions options) {
  if (!(t >= 0.0) || t > problem.horizon * (1.0 + 1e-12))
    throw std::invalid_argument(problem.name + ": t = " + format_double(t) + " outside [0, horizon = " +
                                format_double(problem.horizon) + "]");
  if (t == 0.0) return phi;
  const std::size_t steps = rate > 0.0 ? static_cast<std::size_t>(std::ceil(t * rate / options.cfl)) : 1;
  const double dt = t / static_cast<double>(steps);
  GridFunction v = phi;
  for (std::size_t s = 0; s < steps; ++s) v = dp_step(problem, v, dt);
  return v;
}

}  // namespace

GridFunction evolve_hjb(const ControlProblem& problem, const GridFunction& phi, double t, DpOptions options) {
  if (!(options.cfl > 0.0)) throw std::invalid_argument("evolve_hjb: cfl must be > 0");
  return iterate_dp(problem, phi, t, max_cell_rate(problem), options);
}

SemigroupOperator make_hjb(const ControlProblem& problem, DpOptions options) {
  validate(problem);
  if (!(options.cfl > 0.0)) throw std::invalid_argument("make_hjb: cfl must be > 0");
  const double rate = max_cell_rate(problem);
  return SemigroupOperator("hjb-" + problem.name, Norm::Sup, [problem, rate, options](double t, const GridFunction& phi) {
    return iterate_dp(problem, phi, t, rate, options);
  });
}

Hamiltonian induced_hamiltonian(const ControlProblem& problem, Interval p_range) {
  if (!problem.state_independent || problem.state_grid.dim() != 1)
    throw std::invalid_argument(problem.name + ": induced Hamiltonian needs a state-independent 1-D problem");
  double speed = 0.0;
  for (const Point& u : problem.controls) speed = std::max(speed, std::fabs(problem.dynamics(Point{}, u)[0]));
  Hamiltonian h;
  h.name = "induced-" + problem.name;
  h.H = [problem](double, double p) { return hamiltonian_eval(problem, Point{}, Point{p, 0.0}); };
  h.p_lipschitz_bound = [speed](double) { return speed; };
  h.state_independent = true;
  h.convex = true;  // a max of affine functions of p
  h.p_range = p_range;
  return h;
}

double hj_consistency_check(const ControlProblem& problem, const GridFunction& phi, double t, DpOptions options,
                            Interval p_range) {
  const Hamiltonian h = induced_hamiltonian(problem, p_range);
  if (t == 0.0) return 0.0;
  const GridFunction dp = evolve_hjb(problem, phi, t, options);
  auto hp = h.H;
  const Lagrangian l = legendre_transform([hp](double p) { return hp(0.0, p); }, p_range);
  const GridFunction hl = hopf_lax_evolve(l, phi, t);
  // Hopf-Lax has no y inside the box for cells whose reachable window lies
  // outside it (bottom); the DP clamps there instead, so those cells are skipped.
  double worst = 0.0;
  bool any = false;
  for (std::size_t k = 0; k < hl.size(); ++k) {
    if (std::isinf(hl.value(k)) || std::isinf(dp.value(k))) continue;
    any = true;
    worst = std::max(worst, std::fabs(dp.value(k) - hl.value(k)));
  }
  if (!any) throw std::invalid_argument(problem.name + ": no cell is reachable by both solvers");
  return worst;
}

}  // namespace mpsg
