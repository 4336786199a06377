#include "experiment.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mpsg/conservation_law.hpp"
#include "mpsg/errors.hpp"
#include "mpsg/generator.hpp"
#include "mpsg/hamilton_jacobi.hpp"
#include "mpsg/hjb.hpp"
#include "mpsg/samples.hpp"
#include "mpsg/version.hpp"

namespace mpsg::tools {

namespace pt = boost::property_tree;

// -- expectations --------------------------------------------------------------

Expectation parse_expectation(const std::string& s) {
  if (s == "EXACT") return Expectation::Exact;
  if (s == "WITHIN_SCHEME_ERROR") return Expectation::WithinSchemeError;
  if (s == "HOLDS") return Expectation::Holds;
  if (s == "VIOLATED") return Expectation::Violated;
  if (s == "ANY") return Expectation::Any;
  throw std::invalid_argument("unknown expectation '" + s + "'");
}

std::string_view to_string(Expectation e) noexcept {
  switch (e) {
    case Expectation::Exact: return "EXACT";
    case Expectation::WithinSchemeError: return "WITHIN_SCHEME_ERROR";
    case Expectation::Holds: return "HOLDS";
    case Expectation::Violated: return "VIOLATED";
    case Expectation::Any: return "ANY";
  }
  return "?";
}

bool matches(Expectation e, Verdict v) noexcept {
  switch (e) {
    case Expectation::Exact: return v == Verdict::Exact;
    case Expectation::WithinSchemeError: return v == Verdict::WithinSchemeError;
    case Expectation::Holds: return v == Verdict::Exact || v == Verdict::WithinSchemeError;
    case Expectation::Violated: return v == Verdict::Violated;
    case Expectation::Any: return true;
  }
  return false;
}

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::Evolve: return "evolve";
    case Command::Check: return "check";
    case Command::Generator: return "generator";
    case Command::Resolvent: return "resolvent";
    case Command::QuotientDemo: return "quotient-demo";
    case Command::Convergence: return "convergence";
  }
  return "?";
}

// -- parsing -------------------------------------------------------------------

namespace {

const std::map<std::string, std::set<std::string>> kAllowedKeys = {
    {"operator",
     {"name", "direction", "hamiltonian", "hamiltonian_table", "flux", "speed", "state_min", "state_max", "cfl",
      "viscosity", "enforce_monotonicity", "problem", "controls", "control_min", "control_max", "reward",
      "control_cost", "horizon", "control_table", "rescale", "rescale_alpha", "rescale_beta"}},
    {"grid", {"xmin", "xmax", "n", "periodic", "ymin", "ymax", "ny", "yperiodic"}},
    {"initial", {"preset", "file", "samples", "families", "dyadic", "pairs", "amplitude"}},
    {"run",
     {"times", "properties", "norm", "seed", "levels", "shift", "s", "omega", "exact_relative", "scheme_constant",
      "shrink_factor", "t_seq", "richardson_order", "generator_exact", "counterexample", "resolvent_alpha",
      "resolvent_dt"}},
    {"expect", {}},
};

const std::set<std::string> kOperators = {"identity", "translation", "godunov", "hopf-lax",
                                          "lax-friedrichs", "hj", "hjb"};
const std::set<std::string> kPresets = {"gaussian", "neg-quadratic", "sine", "cosine", "riemann-shock",
                                        "riemann-rarefaction", "zero", "file"};

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    std::string s = *v;
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
  }

  void text(const std::string& section, const std::string& key, std::string& out) const {
    if (auto v = raw(section, key)) out = *v;
  }

  void number(const std::string& section, const std::string& key, double& out) const {
    if (auto v = raw(section, key)) out = to_number(section + "." + key, *v);
  }

  void number(const std::string& section, const std::string& key, std::optional<double>& out) const {
    if (auto v = raw(section, key)) out = to_number(section + "." + key, *v);
  }

  template <class Int>
  void integer(const std::string& section, const std::string& key, Int& out) const {
    if (auto v = raw(section, key)) {
      const std::string field = section + "." + key;
      try {
        std::size_t pos = 0;
        const long long x = std::stoll(*v, &pos);
        if (pos != v->size() || x < 0) throw std::invalid_argument(*v);
        out = static_cast<Int>(x);
      } catch (const std::exception&) {
        throw ConfigError(field, "expected a nonnegative integer, found '" + *v + "'");
      }
    }
  }

  void flag(const std::string& section, const std::string& key, bool& out) const {
    if (auto v = raw(section, key)) {
      if (*v == "true" || *v == "1") {
        out = true;
      } else if (*v == "false" || *v == "0") {
        out = false;
      } else {
        throw ConfigError(section + "." + key, "expected true or false, found '" + *v + "'");
      }
    }
  }

  std::vector<std::string> list(const std::string& section, const std::string& key) const {
    std::vector<std::string> items;
    if (auto v = raw(section, key)) {
      std::string s = *v;
      std::replace(s.begin(), s.end(), ',', ' ');
      std::istringstream in(s);
      std::string tok;
      while (in >> tok) items.push_back(tok);
    }
    return items;
  }

  static double to_number(const std::string& field, const std::string& s) {
    try {
      return parse_max_scalar(s).finite_value();
    } catch (const std::exception&) {
      throw ConfigError(field, "expected a finite number, found '" + s + "'");
    }
  }

 private:
  const pt::ptree& tree_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

void require_file(const std::string& field, const std::filesystem::path& p) {
  if (p.empty()) throw ConfigError(field, "a file is required");
  if (!std::filesystem::is_regular_file(p)) throw ConfigError(field, "cannot read '" + p.string() + "'");
}

std::vector<std::vector<double>> read_table(const std::filesystem::path& path, std::size_t columns) {
  std::ifstream in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    std::vector<double> r;
    std::string tok;
    while (row >> tok) {
      try {
        r.push_back(parse_max_scalar(tok).finite_value());
      } catch (const std::exception&) {
        throw ParseError("bad number '" + tok + "'", lineno, path.string());
      }
    }
    if (r.size() != columns)
      throw ParseError("expected " + std::to_string(columns) + " columns", lineno, path.string());
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ParseError("empty table", lineno, path.string());
  return rows;
}

Hamiltonian build_hamiltonian(const ExperimentConfig& c) {
  if (c.hamiltonian == "quadratic") return Hamiltonian::quadratic();
  if (c.hamiltonian == "abs") return Hamiltonian::abs_value();
  std::vector<std::pair<double, double>> table;
  for (const auto& r : read_table(c.hamiltonian_table, 2)) table.emplace_back(r[0], r[1]);
  return Hamiltonian::from_table(std::move(table));
}

FluxFunction build_flux(const ExperimentConfig& c) {
  if (c.flux == "burgers") return FluxFunction::burgers();
  return FluxFunction::linear(c.flux_speed);
}

ControlProblem build_problem(const ExperimentConfig& c, const Grid& grid) {
  GridFunction phi = GridFunction::constant(grid, 0.0);
  const Interval u_range{c.control_min, c.control_max};
  if (c.problem == "integrator")
    return ControlProblem::integrator(grid, std::move(phi), c.horizon, u_range, c.controls, c.reward, c.control_cost);
  if (c.problem == "double-integrator")
    return ControlProblem::double_integrator(grid, std::move(phi), c.horizon, u_range, c.controls, c.control_cost);
  std::vector<std::array<double, 3>> rows;
  for (const auto& r : read_table(c.control_table, 3)) rows.push_back({r[0], r[1], r[2]});
  return ControlProblem::from_table(grid, std::move(phi), c.horizon, rows);
}

void validate_config(ExperimentConfig& c) {
  if (c.op_name.empty()) throw ConfigError("operator.name", "missing");
  if (!kOperators.count(c.op_name)) throw ConfigError("operator.name", "unknown operator '" + c.op_name + "'");
  if (c.direction != "left" && c.direction != "right")
    throw ConfigError("operator.direction", "expected left or right, found '" + c.direction + "'");
  if (c.hamiltonian != "quadratic" && c.hamiltonian != "abs" && c.hamiltonian != "custom-table")
    throw ConfigError("operator.hamiltonian", "expected quadratic, abs or custom-table, found '" + c.hamiltonian + "'");
  if (c.hamiltonian == "custom-table") {
    require_file("operator.hamiltonian_table", c.hamiltonian_table);
    try {
      build_hamiltonian(c);
    } catch (const std::exception& e) {
      throw ConfigError("operator.hamiltonian_table", e.what());
    }
  }
  if (c.flux != "burgers" && c.flux != "linear")
    throw ConfigError("operator.flux", "expected burgers or linear, found '" + c.flux + "'");
  if (c.problem != "integrator" && c.problem != "double-integrator" && c.problem != "custom-table")
    throw ConfigError("operator.problem", "expected integrator, double-integrator or custom-table");
  if (c.problem == "custom-table" && c.op_name == "hjb") require_file("operator.control_table", c.control_table);
  if (c.rescale != "none" && c.rescale != "additive" && c.rescale != "multiplicative")
    throw ConfigError("operator.rescale", "expected none, additive or multiplicative");
  if (c.rescale != "none" && !(c.rescale_alpha > 0.0))
    throw ConfigError("operator.rescale_alpha", "must be positive");
  if (c.op_name == "lax-friedrichs" && !(c.viscosity > 0.0))
    throw ConfigError("operator.viscosity", "must be positive");
  if (c.cfl && !(*c.cfl > 0.0)) throw ConfigError("operator.cfl", "must be positive");

  if (!kPresets.count(c.initial)) throw ConfigError("initial.preset", "unknown preset '" + c.initial + "'");
  if (c.initial == "file") {
    require_file("initial.file", c.initial_file);
    try {
      const GridFunction f = read_grid_function(c.initial_file);
      if (!(f.grid() == c.grid)) throw std::invalid_argument("file grid differs from [grid]");
    } catch (const std::exception& e) {
      throw ConfigError("initial.file", e.what());
    }
  }
  if (c.samples == 0) throw ConfigError("initial.samples", "must be positive");
  if (c.families.empty()) throw ConfigError("initial.families", "empty family list");

  if (c.times.empty()) throw ConfigError("run.times", "empty time list");
  for (double t : c.times)
    if (!(t > 0.0)) throw ConfigError("run.times", "times must be positive");
  if (c.levels == 0) throw ConfigError("run.levels", "must be at least 1");
  if (c.generator_exact != "none" && c.generator_exact != "cos" && c.generator_exact != "x2half" &&
      c.generator_exact != "zero")
    throw ConfigError("run.generator_exact", "expected none, cos, x2half or zero");
  if (!(c.resolvent_alpha > 0.0)) throw ConfigError("run.resolvent_alpha", "must be positive");
  if (!(c.resolvent_dt > 0.0)) throw ConfigError("run.resolvent_dt", "must be positive");

  // Building once on the base grid surfaces unsupported grid/operator pairs
  // before any computation.
  try {
    build_operator(c, c.grid);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("operator", e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [section, body] : tree) {
    auto allowed = kAllowedKeys.find(section);
    if (allowed == kAllowedKeys.end()) throw ConfigError(section, "unknown section");
    if (section == "expect") continue;
    for (const auto& [key, value] : body)
      if (!allowed->second.count(key)) throw ConfigError(section + "." + key, "unknown key");
  }

  ExperimentConfig c;
  c.text = text;
  c.base_dir = base_dir;
  const Reader r(tree);

  r.text("operator", "name", c.op_name);
  r.text("operator", "direction", c.direction);
  r.text("operator", "hamiltonian", c.hamiltonian);
  if (auto v = r.raw("operator", "hamiltonian_table")) c.hamiltonian_table = resolve(base_dir, *v);
  r.text("operator", "flux", c.flux);
  r.number("operator", "speed", c.flux_speed);
  r.number("operator", "state_min", c.state_min);
  r.number("operator", "state_max", c.state_max);
  r.number("operator", "cfl", c.cfl);
  r.number("operator", "viscosity", c.viscosity);
  r.flag("operator", "enforce_monotonicity", c.enforce_monotonicity);
  r.text("operator", "problem", c.problem);
  r.integer("operator", "controls", c.controls);
  r.number("operator", "control_min", c.control_min);
  r.number("operator", "control_max", c.control_max);
  r.number("operator", "reward", c.reward);
  r.number("operator", "control_cost", c.control_cost);
  r.number("operator", "horizon", c.horizon);
  if (auto v = r.raw("operator", "control_table")) c.control_table = resolve(base_dir, *v);
  r.text("operator", "rescale", c.rescale);
  r.number("operator", "rescale_alpha", c.rescale_alpha);
  r.number("operator", "rescale_beta", c.rescale_beta);

  {
    double xmin = -4.0, xmax = 4.0;
    std::size_t n = 256;
    bool periodic = false;
    r.number("grid", "xmin", xmin);
    r.number("grid", "xmax", xmax);
    r.integer("grid", "n", n);
    r.flag("grid", "periodic", periodic);
    try {
      if (r.raw("grid", "ny")) {
        double ymin = -4.0, ymax = 4.0;
        std::size_t ny = 0;
        bool yperiodic = false;
        r.number("grid", "ymin", ymin);
        r.number("grid", "ymax", ymax);
        r.integer("grid", "ny", ny);
        r.flag("grid", "yperiodic", yperiodic);
        c.grid = Grid(Axis{xmin, xmax, n, periodic}, Axis{ymin, ymax, ny, yperiodic});
      } else {
        c.grid = Grid(xmin, xmax, n, periodic);
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError("grid", e.what());
    }
  }

  r.text("initial", "preset", c.initial);
  if (auto v = r.raw("initial", "file")) c.initial_file = resolve(base_dir, *v);
  r.integer("initial", "samples", c.samples);
  if (r.raw("initial", "families")) {
    c.families.clear();
    for (const auto& f : r.list("initial", "families")) {
      if (f == "smooth") {
        c.families.push_back(SampleFamily::SmoothBump);
      } else if (f == "constant") {
        c.families.push_back(SampleFamily::PiecewiseConstant);
      } else if (f == "linear") {
        c.families.push_back(SampleFamily::PiecewiseLinear);
      } else {
        throw ConfigError("initial.families", "unknown family '" + f + "' (smooth, constant, linear)");
      }
    }
  }
  r.flag("initial", "dyadic", c.dyadic);
  if (auto v = r.raw("initial", "pairs")) {
    if (*v == "riemann") {
      c.riemann_pairs = true;
    } else if (*v != "random") {
      throw ConfigError("initial.pairs", "expected random or riemann");
    }
  }
  r.number("initial", "amplitude", c.amplitude);

  if (r.raw("run", "times")) {
    c.times.clear();
    for (const auto& t : r.list("run", "times")) c.times.push_back(Reader::to_number("run.times", t));
  }
  for (const auto& p : r.list("run", "properties")) {
    try {
      c.properties.push_back(parse_property(p));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("run.properties", e.what());
    }
  }
  if (auto v = r.raw("run", "norm")) {
    try {
      c.norm = parse_norm(*v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("run.norm", e.what());
    }
  }
  r.integer("run", "seed", c.seed);
  r.integer("run", "levels", c.levels);
  r.number("run", "shift", c.shift);
  r.number("run", "s", c.law_s);
  r.number("run", "omega", c.omega);
  r.number("run", "exact_relative", c.budget.exact_relative);
  r.number("run", "scheme_constant", c.budget.scheme_constant);
  r.number("run", "shrink_factor", c.budget.shrink_factor);
  if (r.raw("run", "t_seq")) {
    c.t_seq.clear();
    for (const auto& t : r.list("run", "t_seq")) c.t_seq.push_back(Reader::to_number("run.t_seq", t));
  }
  r.integer("run", "richardson_order", c.richardson_order);
  r.text("run", "generator_exact", c.generator_exact);
  r.flag("run", "counterexample", c.counterexample);
  r.number("run", "resolvent_alpha", c.resolvent_alpha);
  r.number("run", "resolvent_dt", c.resolvent_dt);

  if (auto sec = tree.get_child_optional("expect")) {
    for (const auto& [key, value] : *sec) {
      Property p;
      try {
        p = parse_property(key);
      } catch (const std::invalid_argument&) {
        throw ConfigError("expect." + key, "unknown property");
      }
      try {
        c.expect[p] = parse_expectation(value.get_value<std::string>());
      } catch (const std::invalid_argument& e) {
        throw ConfigError("expect." + key, e.what());
      }
    }
  }

  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

// -- building blocks -----------------------------------------------------------

SemigroupOperator build_operator(const ExperimentConfig& c, const Grid& grid) {
  auto op = [&]() -> SemigroupOperator {
    if (c.op_name == "identity") return identity_semigroup(Norm::Sup);
    if (c.op_name == "translation")
      return make_translation(c.direction == "left" ? Direction::Left : Direction::Right);
    if (c.op_name == "godunov") return make_godunov(build_flux(c), {c.state_min, c.state_max}, c.cfl.value_or(0.9));
    if (c.op_name == "hopf-lax") {
      const Hamiltonian h = build_hamiltonian(c);
      if (h.conjugate) return make_hopf_lax(*h.conjugate);
      auto hp = h.H;
      return make_hopf_lax(legendre_transform([hp](double p) { return hp(0.0, p); }, h.p_range));
    }
    LaxFriedrichsOptions lf;
    lf.artificial_viscosity = c.viscosity;
    lf.cfl = c.cfl.value_or(0.45);
    lf.enforce_monotonicity = c.enforce_monotonicity;
    if (c.op_name == "lax-friedrichs") return make_lax_friedrichs(build_hamiltonian(c), lf);
    if (c.op_name == "hj") return make_hj(build_hamiltonian(c), lf);
    DpOptions dp;
    dp.cfl = c.cfl.value_or(1.0);
    return make_hjb(build_problem(c, grid), dp);
  }();
  if (c.rescale == "none") return op;
  return rescale(op, c.rescale_alpha, c.rescale_beta,
                 c.rescale == "additive" ? RescaleVariant::Additive : RescaleVariant::Multiplicative);
}

GridFunction build_initial(const ExperimentConfig& c, const Grid& grid) {
  if (c.initial == "file") {
    const GridFunction f = read_grid_function(c.initial_file);
    if (!(f.grid() == grid)) throw ConfigError("initial.file", "file grid differs from the requested grid");
    return f;
  }
  const std::string& p = c.initial;
  return GridFunction::sample(grid, [&p](double x, double y) {
    const double r2 = x * x + y * y;
    if (p == "gaussian") return std::exp(-r2);
    if (p == "neg-quadratic") return -0.5 * r2;
    if (p == "sine") return std::sin(x);
    if (p == "cosine") return std::cos(x);
    if (p == "riemann-shock") return x < 0.0 ? 1.0 : 0.0;
    if (p == "riemann-rarefaction") return x < 0.0 ? 0.0 : 1.0;
    return 0.0;
  });
}

std::string config_hash(const ExperimentConfig& c) {
  const std::string key = c.text + "\nseed=" + std::to_string(c.seed) + "\nlevels=" + std::to_string(c.levels);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : key) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = hex[h & 0xf];
  return s;
}

// -- running -------------------------------------------------------------------

namespace {

struct Samples {
  std::vector<GridFunction> functions;
  std::vector<FunctionPair> pairs;
  std::vector<FunctionPair> ordered;
};

std::vector<FunctionPair> riemann_pairs(const Grid& grid, SampleGenerator& gen, std::size_t count) {
  auto step = [&](double c, double ul, double ur) {
    return GridFunction::sample(grid, [=](double x) { return x < c ? ul : ur; });
  };
  const double span = grid.xmax() - grid.xmin();
  std::vector<FunctionPair> out;
  for (std::size_t k = 0; k < count; ++k) {
    // Jump positions on a 1/64-of-domain lattice keep the data grid-aligned
    // under refinement.
    const double c1 = grid.xmin() + span * (8.0 + std::floor(gen.uniform(0.0, 16.0))) / 64.0;
    const double c2 = grid.xmin() + span * (32.0 + std::floor(gen.uniform(0.0, 16.0))) / 64.0;
    out.emplace_back(step(c1, 1.0, 0.0), step(c2, 0.0, 1.0));
  }
  return out;
}

Samples draw_samples(const ExperimentConfig& c, const Grid& grid) {
  SampleOptions opts;
  opts.amplitude = c.amplitude;
  opts.families = c.families;
  SampleGenerator gen(c.seed, opts);
  Samples s;
  if (c.dyadic) {
    for (std::size_t k = 0; k < c.samples; ++k) s.functions.push_back(gen.dyadic_function(grid));
    for (std::size_t k = 0; k < c.samples; ++k) s.pairs.emplace_back(gen.dyadic_function(grid), gen.dyadic_function(grid));
  } else {
    s.functions = gen.functions(grid, c.samples);
    s.pairs = c.riemann_pairs ? riemann_pairs(grid, gen, c.samples) : gen.pairs(grid, c.samples);
  }
  s.ordered = gen.ordered_pairs(grid, c.samples);
  return s;
}

struct Level {
  SemigroupOperator op;
  Samples samples;
  GridFunction initial;
};

class Workspace {
 public:
  explicit Workspace(const ExperimentConfig& c) : c_(c) {}

  const Level& at(const Grid& grid) {
    for (auto& [g, lv] : levels_)
      if (g == grid) return lv;
    levels_.emplace_back(grid, Level{build_operator(c_, grid), draw_samples(c_, grid), build_initial(c_, grid)});
    return levels_.back().second;
  }

 private:
  const ExperimentConfig& c_;
  std::vector<std::pair<Grid, Level>> levels_;
};

/// Properties that take every time point at once.
bool uses_all_times(Property p) { return p == Property::StrongContinuity || p == Property::Contraction; }

PropertyReport measure(const ExperimentConfig& c, const Level& lv, Property p, double t) {
  const auto& s = lv.samples;
  switch (p) {
    case Property::MaxAdditivity: return defect_max_additivity(lv.op, t, s.pairs, c.budget);
    case Property::PlusHomogeneity: return defect_plus_homogeneity(lv.op, t, MaxScalar(c.shift), s.functions, c.budget);
    case Property::Monotonicity: return defect_monotonicity(lv.op, t, s.ordered, c.budget);
    case Property::SemigroupLaw: return defect_semigroup_law(lv.op, t, c.law_s, s.functions, c.budget);
    case Property::IsometryL1: return check_isometry_l1(lv.op, t, s.ordered, c.budget);
    case Property::StrongContinuity: {
      std::vector<double> ts = c.times;
      std::sort(ts.rbegin(), ts.rend());
      return check_strong_continuity(lv.op, lv.initial, ts, c.budget);
    }
    case Property::Contraction: {
      if (c.norm && *c.norm != lv.op.native_norm()) {
        const SemigroupOperator in_norm(lv.op.label(), *c.norm,
                                        [op = lv.op](double tt, const GridFunction& f) { return op.evolve(tt, f); });
        return check_contraction(in_norm, c.times, s.pairs, c.omega, c.budget);
      }
      return check_contraction(lv.op, c.times, s.pairs, c.omega, c.budget);
    }
    case Property::Dissipativity: {
      const DiscreteGenerator gen = discrete_generator(lv.op, c.resolvent_dt);
      return dissipativity_probe(lv.op, gen, c.resolvent_alpha, s.pairs);
    }
  }
  throw std::logic_error("unhandled property");
}

class Output {
 public:
  Output(const ExperimentConfig& c, const std::filesystem::path& dir, RunResult& result)
      : c_(c), dir_(dir), result_(result) {
    std::filesystem::create_directories(dir_);
  }

  void csv(const std::string& name, const std::string& header, const std::vector<std::string>& rows) {
    std::ostringstream out;
    out << banner() << header << '\n';
    for (const auto& r : rows) out << r << '\n';
    write(name, out.str());
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    f << content;
    result_.written.push_back((dir_ / name).string());
  }

  std::string banner() const {
    return "# mpsg " + std::string(kVersion) + " config=" + config_hash(c_) + " seed=" + std::to_string(c_.seed) + "\n";
  }

 private:
  const ExperimentConfig& c_;
  std::filesystem::path dir_;
  RunResult& result_;
};

void expect(const ExperimentConfig& c, const PropertyReport& r, std::vector<std::string>& summary, RunResult& result) {
  const auto it = c.expect.find(r.property);
  const Expectation e = it == c.expect.end() ? Expectation::Holds : it->second;
  const bool ok = matches(e, r.verdict);
  std::string line = std::string(to_string(r.property)) + " t=" + format_double(r.t) + " defect=" +
                     format_double(r.defect) + " verdict=" + std::string(to_string(r.verdict)) +
                     " expected=" + std::string(to_string(e)) + (ok ? " ok" : " MISMATCH");
  if (!r.details.empty()) line += " (" + r.details + ")";
  summary.push_back(line);
  if (!ok) {
    result.mismatches.push_back(line);
    result.exit_code = 1;
  }
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + '\n';
  return s;
}

void run_check(const ExperimentConfig& c, Output& out, RunResult& result) {
  if (c.properties.empty()) throw ConfigError("run.properties", "empty property list");
  Workspace ws(c);
  std::vector<std::string> prop_rows, conv_rows, summary;
  summary.push_back("operator " + ws.at(c.grid).op.label() + ", levels " + std::to_string(c.levels) + ", seed " +
                    std::to_string(c.seed));
  for (Property p : c.properties) {
    std::vector<double> ts = uses_all_times(p) ? std::vector<double>{0.0} : c.times;
    for (double t : ts) {
      const RefinementStudy study = refinement_study(
          c.grid, c.levels, [&](const Grid& g) { return measure(c, ws.at(g), p, t); }, c.budget);
      PropertyReport row = study.levels.back().report;
      row.verdict = study.verdict;
      prop_rows.push_back(to_csv_row(row));
      for (auto& r : to_csv_rows(study)) conv_rows.push_back(std::move(r));
      expect(c, row, summary, result);
    }
  }
  out.csv("properties.csv", property_csv_header(), prop_rows);
  out.csv("convergence.csv", convergence_csv_header(), conv_rows);
  out.write("summary.txt", out.banner() + join_lines(summary));
}

void run_evolve(const ExperimentConfig& c, Output& out) {
  const SemigroupOperator op = build_operator(c, c.grid);
  const GridFunction h = build_initial(c, c.grid);
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.snapshots.push_back(h);
  std::vector<double> ts = c.times;
  std::sort(ts.begin(), ts.end());
  std::vector<std::string> summary{"operator " + op.label()};
  for (double t : ts) {
    if (t == traj.times.back()) continue;
    traj.times.push_back(t);
    traj.snapshots.push_back(op.evolve(t, h));
    const auto& u = traj.snapshots.back();
    std::string line = "t=" + format_double(t);
    if (u.is_finite()) line += " sup=" + format_double(norm_sup(u)) + " mass=" + format_double(mass_integral(u));
    summary.push_back(line);
  }
  std::ostringstream s;
  s << out.banner();
  write_trajectory(s, traj);
  out.write("trajectory.txt", s.str());
  out.write("summary.txt", out.banner() + join_lines(summary));
}

void run_generator(const ExperimentConfig& c, Output& out) {
  const SemigroupOperator op = build_operator(c, c.grid);
  const GridFunction f = build_initial(c, c.grid);
  GeneratorOptions go;
  go.richardson_order = c.richardson_order;
  const GeneratorEstimate est = generator_estimate(op, f, c.t_seq, go);
  GeneratorReport rep{op.label(), c.initial, est.t_used, est.richardson_order,
                      std::numeric_limits<double>::quiet_NaN(), est.mask_fraction()};
  if (c.generator_exact != "none") {
    const std::string& which = c.generator_exact;
    const GridFunction exact = GridFunction::sample(c.grid, [&which](double x) {
      if (which == "cos") return std::cos(x);
      if (which == "x2half") return 0.5 * x * x;
      return 0.0;
    });
    rep.sup_error = generator_sup_error(est, exact);
  }
  out.csv("generator.csv", generator_csv_header(), {to_csv_row(rep)});
  std::vector<std::string> summary{"generator of " + op.label() + " on " + c.initial + ": sup_error=" +
                                   format_double(rep.sup_error) + " mask=" + format_double(rep.mask_fraction)};
  if (c.counterexample) {
    const CounterexampleReport r = generator_max_additivity_counterexample();
    out.csv("counterexample.csv", "n,t_min,ordered,join_is_g,witness_x,gap,analytic_gap,max_gap_x,max_gap",
            {std::to_string(r.n) + "," + format_double(r.t_min) + "," + (r.ordered ? "1" : "0") + "," +
             (r.join_is_g ? "1" : "0") + "," + format_double(r.witness_x) + "," + format_double(r.gap) + "," +
             format_double(r.analytic_gap) + "," + format_double(r.max_gap_x) + "," + format_double(r.max_gap)});
    summary.push_back("counterexample: witness x=" + format_double(r.witness_x) + " gap=" + format_double(r.gap) +
                      " analytic=" + format_double(r.analytic_gap));
  }
  out.write("summary.txt", out.banner() + join_lines(summary));
}

void run_resolvent(const ExperimentConfig& c, Output& out, RunResult& result) {
  Workspace ws(c);
  const Level& lv = ws.at(c.grid);
  const PropertyReport r = measure(c, lv, Property::Dissipativity, 0.0);
  std::vector<std::string> summary{"resolvent of " + lv.op.label() + " alpha=" + format_double(c.resolvent_alpha) +
                                   " dt=" + format_double(c.resolvent_dt)};
  expect(c, r, summary, result);
  out.csv("properties.csv", property_csv_header(), {to_csv_row(r)});
  out.write("summary.txt", out.banner() + join_lines(summary));
}

void run_quotient_demo(Output& out, RunResult& result) {
  auto v = [](std::initializer_list<double> xs) { return FiniteMaxVector::from_doubles(std::vector<double>(xs)); };
  const auto instances = quotient_demo_instances();
  std::vector<std::string> rows, summary;
  for (const auto& in : instances) {
    const QuotientResult r = quotient_equivalent(in.f1, in.f2, in.d);
    const bool ok = r.status == in.expected;
    rows.push_back(in.name + "," + std::string(to_string(r.status)) + "," + std::to_string(r.iterations) + "," +
                   (r.g1 ? to_string(*r.g1) : "") + "," + (r.g2 ? to_string(*r.g2) : ""));
    std::string line = in.name + ": " + std::string(to_string(r.status)) + " expected " +
                       std::string(to_string(in.expected)) + (ok ? " ok" : " MISMATCH");
    summary.push_back(line);
    if (!ok) {
      result.mismatches.push_back(line);
      result.exit_code = 1;
    }
  }
  const MaxPlusMatrix t(2, {MaxScalar(0.0), MaxScalar(-1.0), MaxScalar(-1.0), MaxScalar(0.0)});
  const FiniteMaxVector image = quotient_apply(t, v({1, 0}), FiniteSubspace({v({0, 0})}));
  summary.push_back("apply [[0,-1],[-1,0]] to class of (1 0) mod span{(0 0)}: " + to_string(image));
  out.csv("quotient.csv", "instance,status,iterations,g1,g2", rows);
  out.write("summary.txt", out.banner() + join_lines(summary));
}

}  // namespace

std::vector<QuotientInstance> quotient_demo_instances() {
  const double b = -std::numeric_limits<double>::infinity();
  auto v = [](std::initializer_list<double> xs) { return FiniteMaxVector::from_doubles(std::vector<double>(xs)); };
  return {
      {"reflexive", v({2, -1, 0}), v({2, -1, 0}), FiniteSubspace({v({0, b, -3})}), QuotientStatus::Equivalent},
      {"theta-span", v({0, -1}), v({-1, 0}), FiniteSubspace({v({0, 0})}), QuotientStatus::Equivalent},
      {"untouched-coordinate", v({b, 0}), v({b, 1}), FiniteSubspace({v({0, b})}), QuotientStatus::NotEquivalent},
  };
}

RunResult run_experiment(Command command, const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  RunResult result;
  Output out(config, out_dir, result);
  switch (command) {
    case Command::Evolve: run_evolve(config, out); break;
    case Command::Check:
    case Command::Convergence: run_check(config, out, result); break;
    case Command::Generator: run_generator(config, out); break;
    case Command::Resolvent: run_resolvent(config, out, result); break;
    case Command::QuotientDemo: run_quotient_demo(out, result); break;
  }
  return result;
}

}  // namespace mpsg::tools
