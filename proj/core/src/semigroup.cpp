#include "mpsg/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mpsg/errors.hpp"
#include "mpsg/parallel.hpp"

namespace mpsg {

SemigroupOperator::SemigroupOperator(std::string label, Norm native_norm, EvolveFn evolve)
    : label_(std::move(label)), native_norm_(native_norm), evolve_(std::make_shared<const EvolveFn>(std::move(evolve))) {
  if (!*evolve_) throw std::invalid_argument("SemigroupOperator: empty evolve function");
  std::replace(label_.begin(), label_.end(), ',', ';');
}

GridFunction SemigroupOperator::evolve(double t, const GridFunction& f) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument(label_ + ": evolve needs finite t >= 0");
  if (t == 0.0) return f;
  GridFunction out = (*evolve_)(t, f);
  if (!(out.grid() == f.grid())) throw GridMismatch(label_ + ": evolve changed the grid");
  return out;
}

SemigroupOperator identity_semigroup(Norm native_norm) {
  return SemigroupOperator("identity", native_norm, [](double, const GridFunction& f) { return f; });
}

GridFunction translate(const GridFunction& f, double shift) {
  const Grid& grid = f.grid();
  if (grid.dim() != 1 || !grid.periodic()) throw std::invalid_argument("translate: needs a periodic 1-D grid");
  const auto n = static_cast<long long>(grid.n());
  double s = shift / grid.dx();
  const double nearest = std::round(s);
  if (std::fabs(s - nearest) < 1e-9) s = nearest;
  const double k_real = std::floor(s);
  const double w = s - k_real;
  const long long k = ((static_cast<long long>(k_real) % n) + n) % n;
  const auto v = f.values();
  std::vector<double> out(v.size());
  for (long long i = 0; i < n; ++i) {
    const double a = v[static_cast<std::size_t>((i + k) % n)];
    if (w == 0.0) {
      out[static_cast<std::size_t>(i)] = a;
      continue;
    }
    const double b = v[static_cast<std::size_t>((i + k + 1) % n)];
    out[static_cast<std::size_t>(i)] =
        (std::isinf(a) || std::isinf(b)) ? -std::numeric_limits<double>::infinity() : a + w * (b - a);
  }
  return GridFunction(grid, std::move(out));
}

SemigroupOperator make_translation(Direction direction) {
  const bool left = direction == Direction::Left;
  return SemigroupOperator(left ? "translation-left" : "translation-right", Norm::Sup,
                           [left](double t, const GridFunction& f) { return translate(f, left ? t : -t); });
}

// -- enums -----------------------------------------------------------------

namespace {

constexpr std::pair<Property, std::string_view> kPropertyNames[] = {
    {Property::MaxAdditivity, "MAX_ADDITIVITY"},   {Property::PlusHomogeneity, "PLUS_HOMOGENEITY"},
    {Property::Monotonicity, "MONOTONICITY"},      {Property::SemigroupLaw, "SEMIGROUP_LAW"},
    {Property::StrongContinuity, "STRONG_CONTINUITY"}, {Property::Contraction, "CONTRACTION"},
    {Property::IsometryL1, "ISOMETRY_L1"},         {Property::Dissipativity, "DISSIPATIVITY"},
};

constexpr std::pair<Verdict, std::string_view> kVerdictNames[] = {
    {Verdict::Exact, "EXACT"},
    {Verdict::WithinSchemeError, "WITHIN_SCHEME_ERROR"},
    {Verdict::Violated, "VIOLATED"},
    {Verdict::Unknown, "UNKNOWN"},
};

double max_native_norm(std::span<const GridFunction> fs, Norm norm_kind) {
  double s = 1.0;
  for (const auto& f : fs) s = std::max(s, norm(f, norm_kind));
  return s;
}

double max_native_norm(std::span<const FunctionPair> pairs, Norm norm_kind) {
  double s = 1.0;
  for (const auto& [f, g] : pairs) s = std::max({s, norm(f, norm_kind), norm(g, norm_kind)});
  return s;
}

double grid_dx(std::span<const FunctionPair> pairs) { return pairs.empty() ? 0.0 : pairs.front().first.grid().min_width(); }
double grid_dx(std::span<const GridFunction> fs) { return fs.empty() ? 0.0 : fs.front().grid().min_width(); }

PropertyReport make_report(Property p, const SemigroupOperator& op, double t, double defect, std::size_t samples,
                           double scale, double dx, const ErrorBudget& budget, std::string details = {}) {
  PropertyReport r;
  r.property = p;
  r.operator_label = op.label();
  r.t = t;
  r.norm = op.native_norm();
  r.defect = defect;
  r.samples = samples;
  r.scale = scale;
  r.verdict = classify(defect, scale, dx, budget);
  r.details = std::move(details);
  return r;
}

}  // namespace

std::string_view to_string(Property p) noexcept {
  for (const auto& [k, name] : kPropertyNames)
    if (k == p) return name;
  return "?";
}

std::string_view to_string(Verdict v) noexcept {
  for (const auto& [k, name] : kVerdictNames)
    if (k == v) return name;
  return "?";
}

Property parse_property(std::string_view s) {
  for (const auto& [k, name] : kPropertyNames)
    if (name == s) return k;
  throw std::invalid_argument("unknown property '" + std::string(s) + "'");
}

Verdict parse_verdict(std::string_view s) {
  for (const auto& [k, name] : kVerdictNames)
    if (name == s) return k;
  throw std::invalid_argument("unknown verdict '" + std::string(s) + "'");
}

Verdict classify(double defect, double scale, double dx, const ErrorBudget& budget) {
  if (std::isnan(defect)) return Verdict::Unknown;
  if (defect <= budget.exact_relative * scale) return Verdict::Exact;
  if (defect <= budget.scheme_constant * dx * scale) return Verdict::WithinSchemeError;
  return Verdict::Violated;
}

std::string property_csv_header() { return "property,operator,t,norm,defect,samples,verdict"; }

std::string to_csv_row(const PropertyReport& r) {
  return std::string(to_string(r.property)) + "," + r.operator_label + "," + format_double(r.t) + "," +
         std::string(to_string(r.norm)) + "," + format_double(r.defect) + "," + std::to_string(r.samples) + "," +
         std::string(to_string(r.verdict));
}

// -- measurements ----------------------------------------------------------

double lip_seminorm_estimate(const SemigroupOperator& op, double t, std::span<const FunctionPair> pairs, Norm norm_kind) {
  if (pairs.empty()) throw std::invalid_argument("lip_seminorm_estimate: empty sample set");
  for (const auto& [f, g] : pairs) {
    require_finite(f, "lip_seminorm_estimate");
    require_finite(g, "lip_seminorm_estimate");
    if (f == g) throw std::invalid_argument("lip_seminorm_estimate: sample pair with f == g");
  }
  return parallel_max(pairs.size(), [&](std::size_t k) {
    const auto& [f, g] = pairs[k];
    const double den = dist(f, g, norm_kind);
    if (den == 0.0) throw std::invalid_argument("lip_seminorm_estimate: pair at distance zero");
    return dist(op.evolve(t, f), op.evolve(t, g), norm_kind) / den;
  });
}

PropertyReport defect_max_additivity(const SemigroupOperator& op, double t, std::span<const FunctionPair> pairs,
                                     const ErrorBudget& budget) {
  const Norm nk = op.native_norm();
  const double defect = parallel_max(pairs.size(), [&](std::size_t k) {
    const auto& [f, g] = pairs[k];
    const auto lhs = op.evolve(t, pw_oplus(f, g));
    const auto rhs = pw_oplus(op.evolve(t, f), op.evolve(t, g));
    return dist(lhs, rhs, nk);
  });
  return make_report(Property::MaxAdditivity, op, t, defect, pairs.size(), max_native_norm(pairs, nk), grid_dx(pairs),
                     budget);
}

PropertyReport defect_plus_homogeneity(const SemigroupOperator& op, double t, MaxScalar a,
                                       std::span<const GridFunction> samples, const ErrorBudget& budget) {
  if (a.is_bottom()) throw std::invalid_argument("defect_plus_homogeneity: a must be finite");
  const Norm nk = op.native_norm();
  const double defect = parallel_max(samples.size(), [&](std::size_t k) {
    const auto& f = samples[k];
    return dist(op.evolve(t, pw_otimes(a, f)), pw_otimes(a, op.evolve(t, f)), nk);
  });
  double scale = max_native_norm(samples, nk);
  if (!samples.empty()) {
    const Grid& g = samples.front().grid();
    const double shift_size = nk == Norm::Sup ? std::fabs(a.raw()) : std::fabs(a.raw()) * g.cell_volume() * double(g.size());
    scale = std::max(scale, shift_size);
  }
  return make_report(Property::PlusHomogeneity, op, t, defect, samples.size(), scale, grid_dx(samples), budget,
                     "a=" + to_string(a));
}

PropertyReport defect_monotonicity(const SemigroupOperator& op, double t, std::span<const FunctionPair> ordered,
                                   const ErrorBudget& budget) {
  for (const auto& [f, g] : ordered)
    if (!precedes(f, g)) throw std::invalid_argument("defect_monotonicity: sample pair is not ordered (f <= g)");
  const Norm nk = op.native_norm();
  const double defect = parallel_max(ordered.size(), [&](std::size_t k) {
    const auto& [f, g] = ordered[k];
    return positive_part_norm(op.evolve(t, f), op.evolve(t, g), nk);
  });
  return make_report(Property::Monotonicity, op, t, defect, ordered.size(), max_native_norm(ordered, nk),
                     grid_dx(ordered), budget);
}

PropertyReport defect_semigroup_law(const SemigroupOperator& op, double t, double s,
                                    std::span<const GridFunction> samples, const ErrorBudget& budget) {
  const Norm nk = op.native_norm();
  const double defect = parallel_max(samples.size(), [&](std::size_t k) {
    const auto& f = samples[k];
    return dist(op.evolve(t + s, f), op.evolve(t, op.evolve(s, f)), nk);
  });
  return make_report(Property::SemigroupLaw, op, t, defect, samples.size(), max_native_norm(samples, nk),
                     grid_dx(samples), budget, "s=" + format_double(s));
}

PropertyReport check_contraction(const SemigroupOperator& op, std::span<const double> t_list,
                                 std::span<const FunctionPair> pairs, double omega, const ErrorBudget& budget) {
  const Norm nk = op.native_norm();
  double excess = 0.0;
  double worst_estimate = 0.0;
  double worst_t = t_list.empty() ? 0.0 : t_list.front();
  for (double t : t_list) {
    const double est = lip_seminorm_estimate(op, t, pairs, nk);
    const double over = std::max(0.0, est - std::exp(omega * t));
    if (est > worst_estimate) {
      worst_estimate = est;
      worst_t = t;
    }
    excess = std::max(excess, over);
  }
  PropertyReport r = make_report(Property::Contraction, op, worst_t, excess, pairs.size() * t_list.size(), 1.0,
                                 grid_dx(pairs), budget, "estimate=" + format_double(worst_estimate));
  // Contraction is a bound, not an approximation: anything above tol fails.
  if (r.verdict == Verdict::WithinSchemeError) r.verdict = Verdict::Violated;
  return r;
}

PropertyReport check_isometry_l1(const SemigroupOperator& op, double t, std::span<const FunctionPair> pairs,
                                 const ErrorBudget& budget) {
  const double defect = parallel_max(pairs.size(), [&](std::size_t k) {
    const auto& [f, g] = pairs[k];
    return std::fabs(dist(op.evolve(t, f), op.evolve(t, g), Norm::L1) - dist(f, g, Norm::L1));
  });
  PropertyReport r = make_report(Property::IsometryL1, op, t, defect, pairs.size(), max_native_norm(pairs, Norm::L1),
                                 grid_dx(pairs), budget);
  r.norm = Norm::L1;
  return r;
}

std::vector<std::pair<double, double>> continuity_modulus(const SemigroupOperator& op, const GridFunction& f,
                                                          std::span<const double> t_list) {
  std::vector<std::pair<double, double>> out;
  out.reserve(t_list.size());
  for (double t : t_list) out.emplace_back(t, dist(op.evolve(t, f), f, op.native_norm()));
  return out;
}

PropertyReport check_strong_continuity(const SemigroupOperator& op, const GridFunction& f,
                                       std::span<const double> t_list, const ErrorBudget& budget) {
  const auto modulus = continuity_modulus(op, f, t_list);
  const double scale = std::max(1.0, norm(f, op.native_norm()));
  const double tol = budget.exact_relative * scale;
  bool all_exact = true;
  bool decreasing = true;
  for (std::size_t k = 0; k < modulus.size(); ++k) {
    all_exact = all_exact && modulus[k].second <= tol;
    if (k > 0 && modulus[k].second > modulus[k - 1].second + tol) decreasing = false;
  }
  PropertyReport r;
  r.property = Property::StrongContinuity;
  r.operator_label = op.label();
  r.norm = op.native_norm();
  r.samples = modulus.size();
  r.scale = scale;
  r.t = modulus.empty() ? 0.0 : modulus.back().first;
  r.defect = modulus.empty() ? 0.0 : modulus.back().second;
  if (all_exact) {
    r.verdict = Verdict::Exact;
  } else if (decreasing && modulus.size() > 1 && modulus.back().second < modulus.front().second) {
    r.verdict = Verdict::WithinSchemeError;
  } else {
    r.verdict = Verdict::Violated;
  }
  return r;
}

RefinementStudy refinement_study(const Grid& base, std::size_t levels,
                                 const std::function<PropertyReport(const Grid&)>& level, const ErrorBudget& budget) {
  if (levels == 0) throw std::invalid_argument("refinement_study: need at least one level");
  RefinementStudy study;
  std::size_t factor = 1;
  for (std::size_t k = 0; k < levels; ++k, factor *= 2) {
    const Grid grid = base.refined(factor);
    RefinementLevel lv;
    lv.n = grid.size();
    lv.dx = grid.min_width();
    lv.report = level(grid);
    study.levels.push_back(std::move(lv));
  }
  study.property = study.levels.front().report.property;
  study.operator_label = study.levels.front().report.operator_label;

  const bool all_exact = std::all_of(study.levels.begin(), study.levels.end(),
                                     [](const RefinementLevel& l) { return l.report.verdict == Verdict::Exact; });
  const auto& last = study.levels.back().report;
  if (all_exact) {
    study.verdict = Verdict::Exact;
  } else if (study.levels.size() == 1) {
    study.verdict = last.verdict;
  } else {
    const auto& prev = study.levels[study.levels.size() - 2].report;
    const bool shrinks = last.defect <= budget.shrink_factor * prev.defect;
    study.verdict = (shrinks && last.verdict != Verdict::Violated) ? Verdict::WithinSchemeError : Verdict::Violated;
  }
  return study;
}

std::string convergence_csv_header() { return "property,operator,n,dx,t,norm,defect,level_verdict,study_verdict"; }

std::vector<std::string> to_csv_rows(const RefinementStudy& study) {
  std::vector<std::string> rows;
  for (const auto& lv : study.levels) {
    const auto& r = lv.report;
    rows.push_back(std::string(to_string(r.property)) + "," + r.operator_label + "," + std::to_string(lv.n) + "," +
                   format_double(lv.dx) + "," + format_double(r.t) + "," + std::string(to_string(r.norm)) + "," +
                   format_double(r.defect) + "," + std::string(to_string(r.verdict)) + "," +
                   std::string(to_string(study.verdict)));
  }
  return rows;
}

}  // namespace mpsg
