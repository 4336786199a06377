#include "mpsg/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mpsg/errors.hpp"
#include "mpsg/io.hpp"
#include "mpsg/parallel.hpp"

namespace mpsg {

namespace {

double sample_scale(std::span<const GridFunction> samples, Norm which) {
  double s = 1.0;
  for (const auto& f : samples) s = std::max(s, norm(f, which));
  return s;
}

}  // namespace

std::string_view to_string(RescaleVariant v) noexcept { return v == RescaleVariant::Additive ? "ADDITIVE" : "MULTIPLICATIVE"; }

RescaleVariant parse_rescale_variant(std::string_view s) {
  if (s == "ADDITIVE" || s == "additive") return RescaleVariant::Additive;
  if (s == "MULTIPLICATIVE" || s == "multiplicative") return RescaleVariant::Multiplicative;
  throw std::invalid_argument("unknown rescale variant '" + std::string(s) + "'");
}

SemigroupOperator rescale(const SemigroupOperator& op, double alpha, double beta, RescaleVariant variant) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("rescale: alpha must be positive");
  if (!std::isfinite(beta)) throw std::invalid_argument("rescale: beta must be finite");
  std::string label = op.label() + "|rescale-" + (variant == RescaleVariant::Additive ? "add" : "mul") +
                      " alpha=" + format_double(alpha) + " beta=" + format_double(beta);
  if (variant == RescaleVariant::Additive) {
    return SemigroupOperator(std::move(label), op.native_norm(), [op, alpha, beta](double t, const GridFunction& f) {
      return pw_otimes(MaxScalar(beta * t), op.evolve(alpha * t, f));
    });
  }
  return SemigroupOperator(std::move(label), op.native_norm(), [op, alpha, beta](double t, const GridFunction& f) {
    const GridFunction u = op.evolve(alpha * t, f);
    const double factor = std::exp(beta * t);
    std::vector<double> out(u.values().begin(), u.values().end());
    for (double& x : out) x *= factor;  // -inf stays -inf since factor > 0
    return GridFunction(u.grid(), std::move(out));
  });
}

double commutation_defect(const SemigroupOperator& op_t, const SemigroupOperator& op_u,
                          std::span<const GridFunction> samples, std::span<const double> t_list) {
  const std::size_t cases = samples.size() * t_list.size();
  return parallel_max(cases, [&](std::size_t k) {
    const auto& f = samples[k / t_list.size()];
    const double t = t_list[k % t_list.size()];
    return dist(op_t.evolve(t, op_u.evolve(t, f)), op_u.evolve(t, op_t.evolve(t, f)), op_t.native_norm());
  });
}

SemigroupOperator product(const SemigroupOperator& op_t, const SemigroupOperator& op_u,
                          std::span<const GridFunction> commutation_samples, std::span<const double> t_list,
                          double tolerance) {
  if (commutation_samples.empty() || t_list.empty())
    throw std::invalid_argument("product: commutation check needs samples and times");
  const double defect = commutation_defect(op_t, op_u, commutation_samples, t_list);
  const double bound = tolerance * sample_scale(commutation_samples, op_t.native_norm());
  if (defect > bound) {
    throw ConstructionRefused("product(" + op_t.label() + ", " + op_u.label() + "): commutation defect " +
                              format_double(defect) + " exceeds " + format_double(bound));
  }
  return SemigroupOperator(op_t.label() + "*" + op_u.label(), op_t.native_norm(),
                           [op_t, op_u](double t, const GridFunction& f) { return op_t.evolve(t, op_u.evolve(t, f)); });
}

NamedPredicate concave_predicate(double tol) {
  return {"concave", [tol](const GridFunction& f) {
            if (!f.is_finite() || f.grid().dim() != 1) return false;
            const auto v = f.values();
            const double bound = tol * std::max(1.0, norm_sup(f));
            for (std::size_t i = 1; i + 1 < v.size(); ++i)
              if (v[i + 1] - 2.0 * v[i] + v[i - 1] > bound) return false;
            return true;
          }};
}

NamedPredicate bounded_above_predicate(double c) {
  return {"bounded-above " + format_double(c), [c](const GridFunction& f) {
            const auto v = f.values();
            return std::all_of(v.begin(), v.end(), [c](double x) { return x <= c; });
          }};
}

NamedPredicate nonnegative_predicate() {
  return {"nonnegative", [](const GridFunction& f) {
            const auto v = f.values();
            return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; });
          }};
}

SemigroupOperator restrict(const SemigroupOperator& op, const NamedPredicate& predicate,
                           std::span<const GridFunction> invariance_samples, std::span<const double> t_list) {
  if (invariance_samples.empty()) throw std::invalid_argument("restrict: invariance check needs samples");
  for (std::size_t k = 0; k < invariance_samples.size(); ++k) {
    if (!predicate.test(invariance_samples[k]))
      throw ConstructionRefused("restrict(" + op.label() + "): sample " + std::to_string(k) + " is not " +
                                predicate.name);
    for (double t : t_list) {
      if (!predicate.test(op.evolve(t, invariance_samples[k])))
        throw ConstructionRefused("restrict(" + op.label() + "): T(" + format_double(t) + ") maps sample " +
                                  std::to_string(k) + " outside '" + predicate.name + "'");
    }
  }
  return SemigroupOperator(op.label() + "|" + predicate.name, op.native_norm(),
                           [op, predicate](double t, const GridFunction& f) {
                             if (!predicate.test(f))
                               throw std::invalid_argument(op.label() + ": input is not " + predicate.name);
                             return op.evolve(t, f);
                           });
}

GridFunction reflect(const GridFunction& f) {
  if (f.grid().dim() != 1) throw std::invalid_argument("reflect: 1-D grids only");
  const auto v = f.values();
  return GridFunction(f.grid(), std::vector<double>(v.rbegin(), v.rend()));
}

SemigroupOperator conjugate(const SemigroupOperator& op, GridMap v, GridMap v_inv,
                            std::span<const GridFunction> samples, double tol) {
  if (!v || !v_inv) throw std::invalid_argument("conjugate: empty map");
  if (samples.empty()) throw std::invalid_argument("conjugate: inverse check needs samples");
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& f = samples[k];
    const GridFunction vf = v(f);
    const GridFunction vinvf = v_inv(f);
    if (!(vf.grid() == f.grid()) || !(vinvf.grid() == f.grid()))
      throw ConstructionRefused("conjugate: maps must preserve the grid");
    if (f.is_finite() && (!vf.is_finite() || !vinvf.is_finite()))
      throw ConstructionRefused("conjugate: map sends a finite sample to a function with bottom entries");
    const double bound = tol * std::max(1.0, norm_sup(f));
    const double e1 = dist(v_inv(vf), f, Norm::Sup);
    const double e2 = dist(v(vinvf), f, Norm::Sup);
    if (e1 > bound || e2 > bound)
      throw ConstructionRefused("conjugate: V and Vinv are not inverse on sample " + std::to_string(k) +
                                " (defect " + format_double(std::max(e1, e2)) + ")");
  }
  return SemigroupOperator(op.label() + "|conjugated", op.native_norm(),
                           [op, v = std::move(v), v_inv = std::move(v_inv)](double t, const GridFunction& f) {
                             return v_inv(op.evolve(t, v(f)));
                           });
}

// -- finite vectors ----------------------------------------------------------

FiniteMaxVector::FiniteMaxVector(std::vector<MaxScalar> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("FiniteMaxVector: needs at least one entry");
}

FiniteMaxVector FiniteMaxVector::bottom(std::size_t n) { return FiniteMaxVector(std::vector<MaxScalar>(n)); }

FiniteMaxVector FiniteMaxVector::from_doubles(std::span<const double> values) {
  std::vector<MaxScalar> e;
  e.reserve(values.size());
  for (double x : values) e.emplace_back(x);
  return FiniteMaxVector(std::move(e));
}

namespace {

void require_same_size(const FiniteMaxVector& a, const FiniteMaxVector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

}  // namespace

FiniteMaxVector vec_oplus(const FiniteMaxVector& a, const FiniteMaxVector& b) {
  require_same_size(a, b);
  std::vector<MaxScalar> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = oplus(a[i], b[i]);
  return FiniteMaxVector(std::move(out));
}

FiniteMaxVector vec_otimes(MaxScalar c, const FiniteMaxVector& a) {
  std::vector<MaxScalar> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = otimes(c, a[i]);
  return FiniteMaxVector(std::move(out));
}

bool vec_leq(const FiniteMaxVector& a, const FiniteMaxVector& b) {
  require_same_size(a, b);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!leq(a[i], b[i])) return false;
  return true;
}

FiniteSubspace::FiniteSubspace(std::vector<FiniteMaxVector> generators) : generators_(std::move(generators)) {
  if (generators_.empty()) throw std::invalid_argument("FiniteSubspace: needs at least one generator");
  for (const auto& g : generators_) require_same_size(g, generators_.front());
}

FiniteMaxVector FiniteSubspace::combine(std::span<const MaxScalar> coefficients) const {
  if (coefficients.size() != rank()) throw std::invalid_argument("FiniteSubspace::combine: wrong coefficient count");
  FiniteMaxVector out = FiniteMaxVector::bottom(dimension());
  for (std::size_t j = 0; j < rank(); ++j) out = vec_oplus(out, vec_otimes(coefficients[j], generators_[j]));
  return out;
}

std::vector<MaxScalar> FiniteSubspace::residuate(const FiniteMaxVector& w) const {
  require_same_size(w, generators_.front());
  std::vector<MaxScalar> a(rank());
  for (std::size_t j = 0; j < rank(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dimension(); ++i) {
      const MaxScalar dij = generators_[j][i];
      if (dij.is_bottom()) continue;
      best = std::min(best, w[i].raw() - dij.raw());
    }
    a[j] = std::isinf(best) ? MaxScalar::bottom() : MaxScalar(best);
  }
  return a;
}

std::vector<bool> FiniteSubspace::support() const {
  std::vector<bool> s(dimension(), false);
  for (const auto& g : generators_)
    for (std::size_t i = 0; i < dimension(); ++i) s[i] = s[i] || g[i].is_finite();
  return s;
}

MaxPlusMatrix::MaxPlusMatrix(std::size_t n, std::vector<MaxScalar> row_major) : n_(n), entries_(std::move(row_major)) {
  if (n_ == 0 || entries_.size() != n_ * n_) throw std::invalid_argument("MaxPlusMatrix: needs n*n entries, n >= 1");
}

MaxPlusMatrix MaxPlusMatrix::identity(std::size_t n) {
  std::vector<MaxScalar> e(n * n);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = MaxScalar::unit();
  return MaxPlusMatrix(n, std::move(e));
}

FiniteMaxVector MaxPlusMatrix::apply(const FiniteMaxVector& x) const {
  if (x.size() != n_) throw std::invalid_argument("MaxPlusMatrix::apply: dimension mismatch");
  std::vector<MaxScalar> out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i] = oplus(out[i], otimes(at(i, j), x[j]));
  return FiniteMaxVector(std::move(out));
}

std::string_view to_string(QuotientStatus s) noexcept {
  switch (s) {
    case QuotientStatus::Equivalent: return "EQUIVALENT";
    case QuotientStatus::NotEquivalent: return "NOT_EQUIVALENT";
    case QuotientStatus::Unknown: return "UNKNOWN";
  }
  return "?";
}

QuotientResult quotient_equivalent(const FiniteMaxVector& f1, const FiniteMaxVector& f2, const FiniteSubspace& d,
                                   std::size_t max_iterations) {
  require_same_size(f1, f2);
  if (f1.size() != d.dimension()) throw std::invalid_argument("quotient_equivalent: subspace dimension mismatch");

  // Start above every finite entry so that the first iterate dominates both
  // vectors on the support of D.
  double f_max = 0.0;
  for (const auto* v : {&f1, &f2})
    for (MaxScalar x : v->entries())
      if (x.is_finite()) f_max = std::max(f_max, x.raw());
  double d_min = 0.0;
  for (const auto& g : d.generators())
    for (MaxScalar x : g.entries())
      if (x.is_finite()) d_min = std::min(d_min, x.raw());
  const MaxScalar start(f_max - d_min + 1.0);

  std::vector<MaxScalar> a(d.rank());
  for (std::size_t j = 0; j < d.rank(); ++j) {
    const auto& e = d.generators()[j].entries();
    a[j] = std::any_of(e.begin(), e.end(), [](MaxScalar x) { return x.is_finite(); }) ? start : MaxScalar::bottom();
  }

  QuotientResult result;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    result.iterations = it;
    const FiniteMaxVector w = vec_oplus(f1, d.combine(a));
    if (!vec_leq(f2, w)) {
      result.status = QuotientStatus::NotEquivalent;
      return result;
    }
    std::vector<MaxScalar> b = d.residuate(w);
    const FiniteMaxVector v = vec_oplus(f2, d.combine(b));
    if (v == w) {
      FiniteMaxVector g1 = d.combine(a);
      FiniteMaxVector g2 = d.combine(b);
      if (!(vec_oplus(f1, g1) == vec_oplus(f2, g2))) break;  // witness failed verification
      result.status = QuotientStatus::Equivalent;
      result.a = std::move(a);
      result.b = std::move(b);
      result.g1 = std::move(g1);
      result.g2 = std::move(g2);
      return result;
    }
    if (!vec_leq(f1, v)) {
      result.status = QuotientStatus::NotEquivalent;
      return result;
    }
    a = d.residuate(v);
  }
  result.status = QuotientStatus::Unknown;
  return result;
}

FiniteMaxVector quotient_apply(const MaxPlusMatrix& t, const FiniteMaxVector& rep, const FiniteSubspace& d,
                               std::size_t max_iterations) {
  if (t.size() != d.dimension() || rep.size() != d.dimension())
    throw std::invalid_argument("quotient_apply: dimension mismatch");
  const FiniteMaxVector zero = FiniteMaxVector::bottom(d.dimension());
  for (std::size_t j = 0; j < d.rank(); ++j) {
    const auto r = quotient_equivalent(t.apply(d.generators()[j]), zero, d, max_iterations);
    if (r.status != QuotientStatus::Equivalent)
      throw ConstructionRefused("quotient_apply: T d_" + std::to_string(j) + " is not in the class of D (" +
                                std::string(to_string(r.status)) + ")");
  }
  return t.apply(rep);
}

FiniteMaxVector parse_finite_vector(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::vector<MaxScalar> e;
  std::string tok;
  while (in >> tok) e.push_back(parse_max_scalar(tok));
  if (e.empty()) throw std::invalid_argument("parse_finite_vector: empty line");
  return FiniteMaxVector(std::move(e));
}

std::string to_string(const FiniteMaxVector& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += to_string(v[i]);
  }
  return s;
}

FiniteSubspace read_subspace(std::istream& in) {
  LineReader reader(in);
  std::vector<FiniteMaxVector> gens;
  std::string line;
  while (reader.next(line)) {
    try {
      gens.push_back(parse_finite_vector(line));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), reader.line());
    }
    if (gens.back().size() != gens.front().size())
      throw ParseError("generator length " + std::to_string(gens.back().size()) + " differs from " +
                           std::to_string(gens.front().size()),
                       reader.line());
  }
  if (gens.empty()) throw ParseError("no generators", reader.line());
  return FiniteSubspace(std::move(gens));
}

void write_subspace(std::ostream& out, const FiniteSubspace& d) {
  for (const auto& g : d.generators()) out << to_string(g) << '\n';
}

}  // namespace mpsg
