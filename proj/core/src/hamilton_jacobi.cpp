#include "mpsg/hamilton_jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <stdexcept>

#include "mpsg/errors.hpp"

namespace mpsg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// K[d + n - 1] = t L(d dx / t) for d in [-(n-1), n-1], the cost of moving
// from x_i to y_{i+d}.
struct HopfLaxKernel {
  std::vector<double> cost;
  std::ptrdiff_t lo = 0;  // finite range of d, inclusive
  std::ptrdiff_t hi = -1;
};

HopfLaxKernel build_kernel(const Lagrangian& lagrangian, std::size_t n, double dx, double t) {
  HopfLaxKernel k;
  const auto nn = static_cast<std::ptrdiff_t>(n);
  k.cost.assign(2 * n - 1, kInf);
  k.lo = nn;
  k.hi = -nn;
  for (std::ptrdiff_t d = -(nn - 1); d <= nn - 1; ++d) {
    const double l = lagrangian.L(static_cast<double>(d) * dx / t);
    if (std::isnan(l)) throw std::domain_error("Lagrangian '" + lagrangian.name + "' returned NaN");
    if (std::isinf(l) && l > 0) continue;
    k.cost[static_cast<std::size_t>(d + nn - 1)] = t * l;
    k.lo = std::min(k.lo, d);
    k.hi = std::max(k.hi, d);
  }
  return k;
}

void require_hopf_lax_grid(const GridFunction& h) {
  if (h.grid().dim() != 1 || h.grid().periodic())
    throw std::invalid_argument("hopf_lax: needs a non-periodic 1-D grid");
}

GridFunction apply_kernel(const HopfLaxKernel& k, const GridFunction& h) {
  const std::size_t n = h.size();
  const auto nn = static_cast<std::ptrdiff_t>(n);
  const auto v = h.values();
  std::vector<double> out(n, -kInf);
  for (std::ptrdiff_t i = 0; i < nn; ++i) {
    const std::ptrdiff_t jlo = std::max<std::ptrdiff_t>(0, i + k.lo);
    const std::ptrdiff_t jhi = std::min<std::ptrdiff_t>(nn - 1, i + k.hi);
    double best = -kInf;
    for (std::ptrdiff_t j = jlo; j <= jhi; ++j) {
      const double c = k.cost[static_cast<std::size_t>(j - i + nn - 1)];
      const double hj = v[static_cast<std::size_t>(j)];
      if (std::isinf(c) || std::isinf(hj)) continue;
      best = std::max(best, hj - c);
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return GridFunction(h.grid(), std::move(out));
}

std::size_t neighbor(std::ptrdiff_t i, std::size_t n, bool periodic) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
  if (periodic) return static_cast<std::size_t>(((i % nn) + nn) % nn);
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, nn - 1));
}

double max_central_difference(const GridFunction& u) {
  const std::size_t n = u.size();
  const bool periodic = u.grid().periodic();
  const auto v = u.values();
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    m = std::max(m, std::fabs(v[neighbor(ii + 1, n, periodic)] - v[neighbor(ii - 1, n, periodic)]));
  }
  return m / (2.0 * u.grid().dx());
}

}  // namespace

Lagrangian Lagrangian::quadratic() {
  return {"quadratic", [](double q) { return 0.5 * q * q; }, {-kInf, kInf}};
}

Lagrangian Lagrangian::unit_speed() {
  return {"unit-speed", [](double q) { return std::fabs(q) <= 1.0 ? 0.0 : kInf; }, {-1.0, 1.0}};
}

Lagrangian legendre_transform(std::function<double(double)> h_of_p, Interval p_range, std::size_t resolution) {
  if (resolution < 3 || !(p_range.hi > p_range.lo))
    throw std::invalid_argument("legendre_transform: need a nonempty p-range and resolution >= 3");
  auto ps = std::make_shared<std::vector<double>>(resolution);
  auto hs = std::make_shared<std::vector<double>>(resolution);
  for (std::size_t k = 0; k < resolution; ++k) {
    (*ps)[k] = p_range.lo + p_range.length() * static_cast<double>(k) / static_cast<double>(resolution - 1);
    (*hs)[k] = h_of_p((*ps)[k]);
    if (!std::isfinite((*hs)[k])) throw std::invalid_argument("legendre_transform: H is not finite on the p-range");
  }
  for (std::size_t k = 1; k + 1 < resolution; ++k) {
    const double mid = 0.5 * ((*hs)[k - 1] + (*hs)[k + 1]);
    if ((*hs)[k] > mid + 1e-9 * (1.0 + std::fabs(mid)))
      throw std::invalid_argument("legendre_transform: H fails the midpoint convexity test at p = " +
                                  format_double((*ps)[k]));
  }
  auto l = [ps, hs](double q) {
    const std::size_t last = ps->size() - 1;
    double best = -kInf;
    double best_interior = -kInf;
    for (std::size_t k = 0; k <= last; ++k) {
      const double val = (*ps)[k] * q - (*hs)[k];
      best = std::max(best, val);
      if (k != 0 && k != last) best_interior = std::max(best_interior, val);
    }
    // Attained only at the edge of the sampled range: the true sup is larger.
    if (best_interior < best - 1e-9 * (1.0 + std::fabs(best))) return kInf;
    return best;
  };
  const double dp = (*ps)[1] - (*ps)[0];
  const Interval dom{((*hs)[1] - (*hs)[0]) / dp, ((*hs)[resolution - 1] - (*hs)[resolution - 2]) / dp};
  return {"legendre", std::move(l), dom};
}

Hamiltonian Hamiltonian::quadratic() {
  Hamiltonian h;
  h.name = "quadratic";
  h.H = [](double, double p) { return 0.5 * p * p; };
  h.p_lipschitz_bound = [](double pmax) { return pmax; };
  h.conjugate = Lagrangian::quadratic();
  return h;
}

Hamiltonian Hamiltonian::abs_value() {
  Hamiltonian h;
  h.name = "abs";
  h.H = [](double, double p) { return std::fabs(p); };
  h.p_lipschitz_bound = [](double) { return 1.0; };
  h.conjugate = Lagrangian::unit_speed();
  return h;
}

Hamiltonian Hamiltonian::from_table(std::vector<std::pair<double, double>> table) {
  if (table.size() < 2) throw std::invalid_argument("Hamiltonian table needs at least two rows");
  std::sort(table.begin(), table.end());
  for (std::size_t k = 0; k < table.size(); ++k) {
    if (!std::isfinite(table[k].first) || !std::isfinite(table[k].second))
      throw std::invalid_argument("Hamiltonian table has non-finite entries");
    if (k > 0 && table[k].first == table[k - 1].first)
      throw std::invalid_argument("Hamiltonian table repeats p = " + format_double(table[k].first));
  }
  auto rows = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(table));
  std::vector<double> slopes;
  for (std::size_t k = 1; k < rows->size(); ++k)
    slopes.push_back(((*rows)[k].second - (*rows)[k - 1].second) / ((*rows)[k].first - (*rows)[k - 1].first));
  double bound = 0.0;
  for (double s : slopes) bound = std::max(bound, std::fabs(s));

  Hamiltonian h;
  h.name = "custom-table";
  h.H = [rows](double, double p) {
    const auto& r = *rows;
    std::size_t k = 1;
    while (k + 1 < r.size() && p > r[k].first) ++k;
    const auto [p0, h0] = r[k - 1];
    const auto [p1, h1] = r[k];
    return h0 + (p - p0) * (h1 - h0) / (p1 - p0);
  };
  h.p_lipschitz_bound = [bound](double) { return bound; };
  h.convex = std::is_sorted(slopes.begin(), slopes.end());
  h.p_range = {rows->front().first, rows->back().first};
  return h;
}

GridFunction hopf_lax_evolve(const Lagrangian& lagrangian, const GridFunction& h, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("hopf_lax_evolve: t must be finite and >= 0");
  require_hopf_lax_grid(h);
  if (t == 0.0 || h.is_all_bottom()) return h;
  return apply_kernel(build_kernel(lagrangian, h.size(), h.grid().dx(), t), h);
}

SemigroupOperator make_hopf_lax(const Lagrangian& lagrangian) {
  struct Cache {
    std::mutex mutex;
    std::map<std::tuple<double, std::size_t, double>, std::shared_ptr<const HopfLaxKernel>> kernels;
  };
  auto cache = std::make_shared<Cache>();
  return SemigroupOperator("hopf-lax-" + lagrangian.name, Norm::Sup,
                           [lagrangian, cache](double t, const GridFunction& h) {
                             require_hopf_lax_grid(h);
                             if (h.is_all_bottom()) return h;
                             const auto key = std::make_tuple(t, h.size(), h.grid().dx());
                             std::shared_ptr<const HopfLaxKernel> k;
                             {
                               std::lock_guard lock(cache->mutex);
                               auto it = cache->kernels.find(key);
                               if (it != cache->kernels.end()) k = it->second;
                             }
                             if (!k) {
                               k = std::make_shared<const HopfLaxKernel>(
                                   build_kernel(lagrangian, h.size(), h.grid().dx(), t));
                               std::lock_guard lock(cache->mutex);
                               cache->kernels.emplace(key, k);
                             }
                             return apply_kernel(*k, h);
                           });
}

double max_slope(const GridFunction& u) {
  if (u.grid().dim() != 1) throw std::invalid_argument("max_slope: 1-D grids only");
  require_finite(u, "max_slope");
  const auto v = u.values();
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) m = std::max(m, std::fabs(v[i + 1] - v[i]));
  if (u.grid().periodic()) m = std::max(m, std::fabs(v.front() - v.back()));
  return m / u.grid().dx();
}

GridFunction lax_friedrichs_step(const Hamiltonian& hamiltonian, const GridFunction& u, double dt,
                                 double artificial_viscosity, bool enforce) {
  if (u.grid().dim() != 1) throw std::invalid_argument("lax_friedrichs_step: 1-D grids only");
  require_finite(u, "lax_friedrichs_step");
  if (!(dt >= 0.0) || !(artificial_viscosity >= 0.0))
    throw std::invalid_argument("lax_friedrichs_step: dt and artificial viscosity must be >= 0");
  const double dx = u.grid().dx();
  if (enforce) {
    if (dt * artificial_viscosity / dx > 0.5 * (1.0 + 1e-12))
      throw CflViolation("lax_friedrichs_step: dt * alpha / dx = " + format_double(dt * artificial_viscosity / dx) +
                         " exceeds 1/2");
    const double need = hamiltonian.p_lipschitz_bound(max_central_difference(u));
    if (need > artificial_viscosity * (1.0 + 1e-12))
      throw CflViolation("lax_friedrichs_step: |dH/dp| bound " + format_double(need) + " exceeds alpha = " +
                         format_double(artificial_viscosity));
  }
  const std::size_t n = u.size();
  const bool periodic = u.grid().periodic();
  const auto v = u.values();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    const double left = v[neighbor(ii - 1, n, periodic)];
    const double right = v[neighbor(ii + 1, n, periodic)];
    const double p = (right - left) / (2.0 * dx);
    const double diffusion = artificial_viscosity * ((right - v[i]) + (left - v[i])) / (2.0 * dx);
    out[i] = v[i] + dt * (hamiltonian.H(u.grid().x(i), p) + diffusion);
  }
  return GridFunction(u.grid(), std::move(out));
}

SemigroupOperator make_lax_friedrichs(const Hamiltonian& hamiltonian, LaxFriedrichsOptions options) {
  if (!(options.artificial_viscosity > 0.0) || !(options.cfl > 0.0))
    throw std::invalid_argument("make_lax_friedrichs: alpha and cfl must be positive");
  std::string label = "lax-friedrichs-" + hamiltonian.name;
  if (!options.enforce_monotonicity) label += "-unchecked";
  return SemigroupOperator(std::move(label), Norm::Sup, [hamiltonian, options](double t, const GridFunction& h) {
    const double dt_max = options.cfl * h.grid().dx() / options.artificial_viscosity;
    const auto steps = static_cast<std::size_t>(std::ceil(t / dt_max));
    const double dt = t / static_cast<double>(steps);
    GridFunction u = h;
    for (std::size_t s = 0; s < steps; ++s)
      u = lax_friedrichs_step(hamiltonian, u, dt, options.artificial_viscosity, options.enforce_monotonicity);
    return u;
  });
}

namespace {

bool uses_hopf_lax(const Hamiltonian& hamiltonian) { return hamiltonian.state_independent && hamiltonian.convex; }

Lagrangian conjugate_of(const Hamiltonian& hamiltonian) {
  if (hamiltonian.conjugate) return *hamiltonian.conjugate;
  auto h = hamiltonian.H;
  return legendre_transform([h](double p) { return h(0.0, p); }, hamiltonian.p_range);
}

}  // namespace

GridFunction evolve_hj(const Hamiltonian& hamiltonian, const GridFunction& h, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("evolve_hj: t must be >= 0");
  if (t == 0.0) return h;
  if (uses_hopf_lax(hamiltonian)) return hopf_lax_evolve(conjugate_of(hamiltonian), h, t);
  const double bound = hamiltonian.p_lipschitz_bound(max_slope(h));
  LaxFriedrichsOptions options;
  options.artificial_viscosity = bound > 0.0 ? bound : 1.0;
  return make_lax_friedrichs(hamiltonian, options).evolve(t, h);
}

SemigroupOperator make_hj(const Hamiltonian& hamiltonian, LaxFriedrichsOptions lf) {
  if (uses_hopf_lax(hamiltonian)) {
    SemigroupOperator inner = make_hopf_lax(conjugate_of(hamiltonian));
    return SemigroupOperator("hj-" + hamiltonian.name, Norm::Sup,
                             [inner](double t, const GridFunction& h) { return inner.evolve(t, h); });
  }
  SemigroupOperator inner = make_lax_friedrichs(hamiltonian, lf);
  return SemigroupOperator("hj-" + hamiltonian.name, Norm::Sup,
                           [inner](double t, const GridFunction& h) { return inner.evolve(t, h); });
}

}  // namespace mpsg
