#include "mpsg/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mpsg/errors.hpp"

namespace mpsg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Value at t = 0 of the polynomial through (ts[j], qs[j]).
double neville_at_zero(std::span<const double> ts, std::vector<double> qs) {
  const std::size_t m = ts.size();
  for (std::size_t level = 1; level < m; ++level)
    for (std::size_t j = 0; j + level < m; ++j)
      qs[j] = (-ts[j + level] * qs[j] + ts[j] * qs[j + 1]) / (ts[j] - ts[j + level]);
  return qs[0];
}

}  // namespace

double GeneratorEstimate::mask_fraction() const {
  if (masked.empty()) return 0.0;
  return static_cast<double>(std::count(masked.begin(), masked.end(), true)) / static_cast<double>(masked.size());
}

GeneratorEstimate generator_estimate(const SemigroupOperator& op, const GridFunction& f, std::span<const double> t_seq,
                                     GeneratorOptions options) {
  require_finite(f, "generator_estimate");
  if (options.richardson_order < 0) throw std::invalid_argument("generator_estimate: negative Richardson order");
  const auto order = static_cast<std::size_t>(options.richardson_order);
  if (t_seq.size() < order + 2)
    throw std::invalid_argument("generator_estimate: need at least richardson_order + 2 times");
  for (std::size_t k = 0; k < t_seq.size(); ++k) {
    if (!(t_seq[k] > 0.0) || (k > 0 && !(t_seq[k] < t_seq[k - 1])))
      throw std::invalid_argument("generator_estimate: t_seq must be positive and strictly decreasing");
  }

  const std::size_t cells = f.size();
  const auto fv = f.values();
  std::vector<std::vector<double>> quotients;
  for (double t : t_seq) {
    const GridFunction u = op.evolve(t, f);
    require_finite(u, "generator_estimate");
    std::vector<double> q(cells);
    for (std::size_t i = 0; i < cells; ++i) q[i] = (u.value(i) - fv[i]) / t;
    quotients.push_back(std::move(q));
  }

  // Extrapolants from the last two windows of order + 1 consecutive times.
  const std::size_t m = t_seq.size();
  auto extrapolate = [&](std::size_t last, std::size_t i) {
    const std::size_t first = last - order;
    std::vector<double> qs;
    for (std::size_t j = first; j <= last; ++j) qs.push_back(quotients[j][i]);
    return neville_at_zero(t_seq.subspan(first, order + 1), std::move(qs));
  };
  std::vector<double> e_last(cells), e_prev(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    e_last[i] = extrapolate(m - 1, i);
    e_prev[i] = extrapolate(m - 2, i);
  }
  double sup = 0.0;
  for (double e : e_last) sup = std::max(sup, std::fabs(e));

  GeneratorEstimate est{GridFunction::bottom(f.grid()), std::vector<bool>(cells, false), t_seq.back(),
                        options.richardson_order};
  std::vector<double> out(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double scale = std::max(std::fabs(e_last[i]), sup);
    const bool ok = std::fabs(e_last[i] - e_prev[i]) <= options.cauchy_tol * scale;
    est.masked[i] = !ok;
    out[i] = ok ? e_last[i] : -kInf;
  }
  est.af = GridFunction(f.grid(), std::move(out));
  return est;
}

double check_translation_invariance(const SemigroupOperator& op, const GridFunction& f, double a,
                                    std::span<const double> t_seq, GeneratorOptions options) {
  const GeneratorEstimate base = generator_estimate(op, f, t_seq, options);
  const GeneratorEstimate shifted = generator_estimate(op, pw_otimes(MaxScalar(a), f), t_seq, options);
  if (base.masked != shifted.masked) return kInf;
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!base.masked[i]) d = std::max(d, std::fabs(base.af.value(i) - shifted.af.value(i)));
  return d;
}

std::string generator_csv_header() { return "operator,f_label,t_min,order,sup_error,domain_mask_fraction"; }

std::string to_csv_row(const GeneratorReport& r) {
  return r.operator_label + "," + r.f_label + "," + format_double(r.t_min) + "," + std::to_string(r.order) + "," +
         format_double(r.sup_error) + "," + format_double(r.mask_fraction);
}

double generator_sup_error(const GeneratorEstimate& est, const GridFunction& exact) {
  require_same_grid(est.af, exact);
  double e = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i)
    if (!est.masked[i]) e = std::max(e, std::fabs(est.af.value(i) - exact.value(i)));
  return e;
}

CounterexampleReport generator_max_additivity_counterexample(std::size_t n, double t_min, Interval domain) {
  const Grid grid(domain.lo, domain.hi, n, true);
  const GridFunction f = GridFunction::sample(grid, [](double x) { return std::exp(-2.0 * x * x); });
  const GridFunction g = GridFunction::sample(grid, [](double x) { return std::exp(-x * x); });
  const SemigroupOperator left = make_translation(Direction::Left);
  const std::vector<double> t_seq{4.0 * t_min, 2.0 * t_min, t_min};

  const GeneratorEstimate af = generator_estimate(left, f, t_seq);
  const GeneratorEstimate ag = generator_estimate(left, g, t_seq);

  CounterexampleReport r;
  r.n = n;
  r.t_min = t_min;
  r.ordered = precedes(f, g);
  r.join_is_g = pw_oplus(f, g) == g;

  std::size_t witness = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::fabs(grid.x(i) + 0.25) < std::fabs(grid.x(witness) + 0.25)) witness = i;
  auto gap_at = [&](std::size_t i) {
    if (af.masked[i] || ag.masked[i]) return -kInf;
    return std::max(af.af.value(i), ag.af.value(i)) - ag.af.value(i);
  };
  r.witness_x = grid.x(witness);
  r.witness_af = af.af.value(witness);
  r.witness_ag = ag.af.value(witness);
  r.gap = gap_at(witness);
  const double x = r.witness_x;
  const double df = -4.0 * x * std::exp(-2.0 * x * x);
  const double dg = -2.0 * x * std::exp(-x * x);
  r.analytic_gap = std::max(df, dg) - dg;

  r.max_gap = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const double gp = gap_at(i);
    if (gp > r.max_gap) {
      r.max_gap = gp;
      r.max_gap_x = grid.x(i);
    }
  }
  return r;
}

GridFunction DiscreteGenerator::apply(const GridFunction& u) const {
  const GridFunction s = step(u);
  return scale(1.0 / dt, subtract(s, u));
}

DiscreteGenerator discrete_generator(const SemigroupOperator& op, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("discrete_generator: dt must be > 0");
  return {op.label(), [op, dt](const GridFunction& u) { return op.evolve(dt, u); }, dt};
}

std::optional<GridFunction> resolvent_solve(const DiscreteGenerator& gen, double alpha, const GridFunction& g,
                                            ResolventOptions options) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("resolvent_solve: alpha must be > 0");
  require_finite(g, "resolvent_solve");
  const double lambda = alpha / gen.dt;
  const double inv = 1.0 / (1.0 + lambda);
  const auto gv = g.values();
  GridFunction u = g;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const GridFunction s = gen.step(u);
    std::vector<double> next(u.size());
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = (gv[i] + lambda * s.value(i)) * inv;
    GridFunction nu(g.grid(), std::move(next));
    const double change = dist(nu, u, Norm::Sup);
    u = std::move(nu);
    if (change <= options.tol * std::max(1.0, norm_sup(u))) return u;
  }
  return std::nullopt;
}

PropertyReport dissipativity_probe(const SemigroupOperator& op, const DiscreteGenerator& gen, double alpha,
                                   std::span<const FunctionPair> pairs, double tol, ResolventOptions options) {
  if (!(alpha > 0.0)) throw std::invalid_argument("dissipativity_probe: alpha must be > 0");
  if (pairs.empty()) throw std::invalid_argument("dissipativity_probe: empty sample set");
  PropertyReport r;
  r.property = Property::Dissipativity;
  r.operator_label = op.label();
  r.t = alpha;
  r.norm = op.native_norm();
  r.samples = pairs.size();
  double estimate = 0.0;
  for (const auto& [g1, g2] : pairs) {
    const auto u1 = resolvent_solve(gen, alpha, g1, options);
    const auto u2 = resolvent_solve(gen, alpha, g2, options);
    if (!u1 || !u2) {
      r.verdict = Verdict::Unknown;
      r.defect = std::numeric_limits<double>::quiet_NaN();
      r.details = "fixed-point iteration hit the cap";
      return r;
    }
    const double den = dist(g1, g2, r.norm);
    if (den == 0.0) throw std::invalid_argument("dissipativity_probe: pair at distance zero");
    estimate = std::max(estimate, dist(*u1, *u2, r.norm) / den);
  }
  r.defect = std::max(0.0, estimate - 1.0);
  r.verdict = estimate <= 1.0 + tol ? Verdict::Exact : Verdict::Violated;
  r.details = "estimate=" + format_double(estimate);
  return r;
}

}  // namespace mpsg
