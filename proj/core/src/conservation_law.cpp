#include "mpsg/conservation_law.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mpsg/errors.hpp"
#include "mpsg/io.hpp"

namespace mpsg {

namespace {

constexpr int kFluxSamples = 129;

std::pair<double, double> sampled_min_max(const std::function<double(double)>& f, double a, double b) {
  double lo = std::min(f(a), f(b));
  double hi = std::max(f(a), f(b));
  for (int s = 1; s < kFluxSamples - 1; ++s) {
    const double fx = f(a + (b - a) * s / (kFluxSamples - 1));
    lo = std::min(lo, fx);
    hi = std::max(hi, fx);
  }
  return {lo, hi};
}

std::pair<double, double> value_range(const GridFunction& u) {
  const auto v = u.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}

void require_periodic_1d(const GridFunction& u, const char* where) {
  if (u.grid().dim() != 1 || !u.grid().periodic())
    throw std::invalid_argument(std::string(where) + ": needs a periodic 1-D grid");
}

// One step without the CFL check; callers have validated dt.
GridFunction step_unchecked(const FluxFunction& flux, const GridFunction& u, double dt) {
  const std::size_t n = u.size();
  const auto v = u.values();
  const double lambda = dt / u.grid().dx();
  std::vector<double> face(n);  // face[i] = F_{i+1/2}
  for (std::size_t i = 0; i < n; ++i) face[i] = riemann_flux(flux, v[i], v[(i + 1) % n]);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = v[i] - lambda * (face[i] - face[(i + n - 1) % n]);
  return GridFunction(u.grid(), std::move(out));
}

}  // namespace

FluxFunction FluxFunction::burgers() {
  return {"burgers", [](double u) { return 0.5 * u * u; },
          [](Interval r) { return std::max(std::fabs(r.lo), std::fabs(r.hi)); }, 0.0};
}

FluxFunction FluxFunction::linear(double c) {
  return {"linear " + format_double(c), [c](double u) { return c * u; }, [c](Interval) { return std::fabs(c); },
          std::nullopt};
}

FluxFunction FluxFunction::general(std::string name, std::function<double(double)> f) {
  auto bound = [f](Interval r) {
    if (!(r.hi > r.lo)) return 0.0;
    double slope = 0.0;
    double prev = f(r.lo);
    for (int s = 1; s < kFluxSamples; ++s) {
      const double a = r.lo + (r.hi - r.lo) * (s - 1) / (kFluxSamples - 1);
      const double b = r.lo + (r.hi - r.lo) * s / (kFluxSamples - 1);
      const double fb = f(b);
      slope = std::max(slope, std::fabs(fb - prev) / (b - a));
      prev = fb;
    }
    return 1.1 * slope;
  };
  return {std::move(name), std::move(f), std::move(bound), std::nullopt};
}

double riemann_flux(const FluxFunction& flux, double u_left, double u_right) {
  if (u_left == u_right) return flux.f(u_left);
  if (flux.convex_minimizer) {
    if (u_left < u_right) return flux.f(std::clamp(*flux.convex_minimizer, u_left, u_right));
    return std::max(flux.f(u_left), flux.f(u_right));
  }
  if (u_left < u_right) return sampled_min_max(flux.f, u_left, u_right).first;
  return sampled_min_max(flux.f, u_right, u_left).second;
}

GridFunction godunov_step(const FluxFunction& flux, const GridFunction& u, double dt) {
  require_periodic_1d(u, "godunov_step");
  require_finite(u, "godunov_step");
  if (!(dt >= 0.0)) throw std::invalid_argument("godunov_step: dt must be >= 0");
  const auto [lo, hi] = value_range(u);
  const double speed = flux.lipschitz_bound_on({lo, hi});
  if (dt * speed > u.grid().dx() * (1.0 + 1e-12))
    throw CflViolation("godunov_step: dt * max|f'| = " + format_double(dt * speed) + " exceeds dx = " +
                       format_double(u.grid().dx()));
  return step_unchecked(flux, u, dt);
}

GridFunction evolve_cl(const FluxFunction& flux, const GridFunction& h, double t, double cfl) {
  if (!(t >= 0.0)) throw std::invalid_argument("evolve_cl: t must be >= 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("evolve_cl: cfl must be in (0, 1]");
  if (t == 0.0 || h.is_all_bottom()) return h;
  require_periodic_1d(h, "evolve_cl");
  require_finite(h, "evolve_cl");
  const auto [lo, hi] = value_range(h);
  const double speed = flux.lipschitz_bound_on({lo, hi});
  const double dt_max = speed > 0.0 ? cfl * h.grid().dx() / speed : t;
  const auto steps = static_cast<std::size_t>(std::ceil(t / dt_max));
  const double dt = t / static_cast<double>(steps);
  GridFunction u = h;
  // The maximum principle keeps the range, so one CFL check covers all steps.
  for (std::size_t s = 0; s < steps; ++s) u = step_unchecked(flux, u, dt);
  return u;
}

SemigroupOperator make_godunov(const FluxFunction& flux, Interval state_range, double cfl) {
  if (!(state_range.hi >= state_range.lo)) throw std::invalid_argument("make_godunov: empty state range");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("make_godunov: cfl must be in (0, 1]");
  const double speed = flux.lipschitz_bound_on(state_range);
  return SemigroupOperator(
      "godunov-" + flux.name, Norm::L1, [flux, state_range, speed, cfl](double t, const GridFunction& h) {
        if (h.is_all_bottom()) return h;
        require_periodic_1d(h, "godunov");
        require_finite(h, "godunov");
        const auto [lo, hi] = value_range(h);
        if (lo < state_range.lo || hi > state_range.hi)
          throw CflViolation("godunov: data range [" + format_double(lo) + ", " + format_double(hi) +
                             "] leaves the configured state range");
        const double dt_max = speed > 0.0 ? cfl * h.grid().dx() / speed : t;
        const auto steps = static_cast<std::size_t>(std::ceil(t / dt_max));
        const double dt = t / static_cast<double>(steps);
        GridFunction u = h;
        for (std::size_t s = 0; s < steps; ++s) u = step_unchecked(flux, u, dt);
        return u;
      });
}

double mass_integral(const GridFunction& u) {
  require_finite(u, "mass_integral");
  return exact_sum(u.values()) * u.grid().cell_volume();
}

// -- trajectories ------------------------------------------------------------

Trajectory cl_trajectory(const FluxFunction& flux, const GridFunction& h, double t_end, std::size_t steps) {
  if (steps == 0 || !(t_end > 0.0)) throw std::invalid_argument("cl_trajectory: needs t_end > 0 and steps > 0");
  const double dt = t_end / static_cast<double>(steps);
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.snapshots.push_back(h);
  for (std::size_t s = 1; s <= steps; ++s) {
    traj.snapshots.push_back(godunov_step(flux, traj.snapshots.back(), dt));
    traj.times.push_back(s == steps ? t_end : dt * static_cast<double>(s));
  }
  return traj;
}

Trajectory sample_on(const Trajectory& like, const std::function<double(double, double)>& fn) {
  Trajectory out;
  out.times = like.times;
  for (double t : like.times)
    out.snapshots.push_back(GridFunction::sample(like.grid(), [&](double x) { return fn(t, x); }));
  return out;
}

std::function<double(double, double)> bump_test_function(double tc, double rt, double xc, double rx) {
  if (!(rt > 0.0 && rx > 0.0)) throw std::invalid_argument("bump_test_function: radii must be positive");
  auto b = [](double s) {
    const double w = 1.0 - s * s;
    return w > 0.0 ? w * w * w : 0.0;
  };
  return [=](double t, double x) { return b((t - tc) / rt) * b((x - xc) / rx); };
}

double kruzkov_residual(const FluxFunction& flux, const Trajectory& trajectory, double k, const Trajectory& psi) {
  const std::size_t m_count = trajectory.size();
  if (m_count < 2 || trajectory.snapshots.size() != m_count)
    throw std::invalid_argument("kruzkov_residual: need at least two snapshots");
  if (psi.size() != m_count || psi.times != trajectory.times)
    throw std::invalid_argument("kruzkov_residual: psi must share the trajectory's time levels");
  const Grid& grid = trajectory.grid();
  if (grid.dim() != 1) throw std::invalid_argument("kruzkov_residual: 1-D grids only");
  for (std::size_t m = 0; m < m_count; ++m) {
    if (!(trajectory.snapshots[m].grid() == grid) || !(psi.snapshots[m].grid() == grid))
      throw GridMismatch("kruzkov_residual: snapshots on different grids");
    require_finite(trajectory.snapshots[m], "kruzkov_residual");
    const auto p = psi.snapshots[m].values();
    if (std::any_of(p.begin(), p.end(), [](double x) { return !(x >= 0.0); }))
      throw std::invalid_argument("kruzkov_residual: psi must be nonnegative");
  }
  for (std::size_t m : {std::size_t{0}, m_count - 1}) {
    const auto p = psi.snapshots[m].values();
    if (std::any_of(p.begin(), p.end(), [](double x) { return x != 0.0; }))
      throw std::invalid_argument(m == 0 ? "kruzkov_residual: psi is supported at the initial time"
                                         : "kruzkov_residual: psi does not vanish at the final time");
  }

  const std::size_t n = grid.n();
  const double dx = grid.dx();
  const double fk = flux.f(k);
  const bool periodic = grid.periodic();
  double total = 0.0;
  for (std::size_t m = 0; m + 1 < m_count; ++m) {
    const double dt = trajectory.times[m + 1] - trajectory.times[m];
    const auto v = trajectory.snapshots[m].values();
    const auto p0 = psi.snapshots[m].values();
    const auto p1 = psi.snapshots[m + 1].values();
    auto psi_at = [&](std::ptrdiff_t i) {
      const auto nn = static_cast<std::ptrdiff_t>(n);
      if (i < 0 || i >= nn) {
        if (!periodic) return 0.0;
        i = (i + nn) % nn;
      }
      return p0[static_cast<std::size_t>(i)];
    };
    double level = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = v[i] - k;
      const double sgn = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
      const double q = (flux.f(v[i]) - fk) * sgn;
      const auto ii = static_cast<std::ptrdiff_t>(i);
      level += std::fabs(d) * (p1[i] - p0[i]) + dt * q * (psi_at(ii + 1) - psi_at(ii - 1)) / (2.0 * dx);
    }
    total += level * dx;
  }
  return total;
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  for (std::size_t m = 0; m < traj.size(); ++m) {
    out << "t " << format_double(traj.times[m]) << '\n';
    write_grid_function(out, traj.snapshots[m]);
  }
}

Trajectory read_trajectory(std::istream& in) {
  LineReader reader(in);
  Trajectory traj;
  std::string line;
  while (reader.next(line)) {
    std::istringstream head(line);
    std::string tag, value, extra;
    if (!(head >> tag >> value) || tag != "t" || (head >> extra))
      throw ParseError("expected 't <time>' record header", reader.line());
    double t = 0.0;
    try {
      t = parse_max_scalar(value).finite_value();
    } catch (const std::exception&) {
      throw ParseError("bad time '" + value + "'", reader.line());
    }
    if (!traj.times.empty() && !(t > traj.times.back()))
      throw ParseError("times must increase", reader.line());
    traj.times.push_back(t);
    traj.snapshots.push_back(read_grid_function(reader));
  }
  if (traj.times.empty()) throw ParseError("empty trajectory", reader.line());
  return traj;
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_trajectory(out, traj);
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return read_trajectory(in);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), path.string());
  }
}

}  // namespace mpsg
