// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "experiment.hpp"
#include "mpsg/conservation_law.hpp"
#include "mpsg/constructions.hpp"
#include "mpsg/generator.hpp"
#include "mpsg/hamilton_jacobi.hpp"
#include "mpsg/hjb.hpp"
#include "mpsg/samples.hpp"

using namespace mpsg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a sub-check; every failing sub-check is named in the detail.
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) { return format_double(v); }

// -- 1 ---------------------------------------------------------------------

void algebra_exactness(Outcome& o) {
  const auto start = Clock::now();
  const Grid g(-4.0, 4.0, 257);
  SampleGenerator gen(11);
  const auto fs = [&] {
    std::vector<GridFunction> v;
    for (int k = 0; k < 1000; ++k) v.push_back(gen.dyadic_function(g));
    return v;
  }();
  const auto zero = GridFunction::bottom(g);
  std::size_t failures = 0;
  auto check = [&](bool ok) { failures += ok ? 0 : 1; };
  for (std::size_t k = 0; k < fs.size(); ++k) {
    const auto& f = fs[k];
    const auto& h = fs[(k + 1) % fs.size()];
    const auto& e = fs[(k + 2) % fs.size()];
    const MaxScalar a(gen.dyadic(-2.0, 2.0)), b(gen.dyadic(-2.0, 2.0));
    // Vector-space axioms.
    check(pw_oplus(pw_oplus(f, h), e) == pw_oplus(f, pw_oplus(h, e)));
    check(pw_oplus(f, h) == pw_oplus(h, f));
    check(pw_oplus(f, f) == f);
    check(pw_oplus(f, zero) == f);
    check(pw_otimes(a, pw_oplus(f, h)) == pw_oplus(pw_otimes(a, f), pw_otimes(a, h)));
    check(pw_otimes(oplus(a, b), f) == pw_oplus(pw_otimes(a, f), pw_otimes(b, f)));
    check(pw_otimes(otimes(a, b), f) == pw_otimes(a, pw_otimes(b, f)));
    check(pw_otimes(MaxScalar::unit(), f) == f);
    check(pw_otimes(MaxScalar::bottom(), f) == zero);
    // Standard order and zero element.
    check(precedes(f, pw_oplus(f, h)) && precedes(zero, f));
    check(precedes(f, h) == (pw_oplus(f, h) == h));
    // (f1) f = f^+ - f^-, |f| = f^+ + f^-.
    const auto parts = lattice_decompose(f);
    check(subtract(parts.pos, parts.neg) == f);
    check(add(parts.pos, parts.neg) == GridFunction::sample(g, [&, i = std::size_t{0}](double) mutable {
            return std::abs(f.value(i++));
          }));
    // (f2) f (+) g = g + (f - g)^+ = f + (g - f)^+.
    const auto join = pw_oplus(f, h);
    check(join == add(h, lattice_decompose(subtract(f, h)).pos));
    check(join == add(f, lattice_decompose(subtract(h, f)).pos));
    // (f3) both routes to ||f - g|| agree bit for bit.
    for (Norm n : {Norm::Sup, Norm::L1}) check(dist(f, h, n) == dist_via_max(f, h, n));
  }
  const double elapsed = seconds_since(start);
  o.detail << "1000 dyadic functions n=257, failed identities=" << failures << ", runtime=" << fmt(elapsed) << "s";
  o.require(failures == 0, "bit-exact identities");
  o.require(elapsed < 1.0, "runtime < 1 s");
}

// -- 2 ---------------------------------------------------------------------

void hopf_lax_linearity(Outcome& o) {
  const auto start = Clock::now();
  const Grid g(-4.0, 4.0, 1024);
  SampleGenerator gen(12);
  const auto pairs = gen.pairs(g, 200);
  std::vector<GridFunction> singles;
  for (const auto& p : pairs) singles.push_back(p.first);
  const auto hl = make_hopf_lax(Lagrangian::quadratic());
  double worst = 0.0;
  for (double t : {0.1, 0.5, 1.0}) {
    const auto ma = defect_max_additivity(hl, t, pairs);
    const auto ph = defect_plus_homogeneity(hl, t, MaxScalar(2.5), singles);
    worst = std::max({worst, ma.defect / ma.scale, ph.defect / ph.scale});
    o.detail << "t=" << t << " max_add=" << fmt(ma.defect) << " plus_hom=" << fmt(ph.defect) << "; ";
  }
  const double elapsed = seconds_since(start);
  o.detail << "worst relative=" << fmt(worst) << ", runtime=" << fmt(elapsed) << "s";
  o.require(worst <= 1e-12, "defects <= 1e-12 scale");
  o.require(elapsed < 30.0, "runtime < 30 s");
}

// -- 3 ---------------------------------------------------------------------

void hopf_lax_benchmark(Outcome& o) {
  const auto hl = make_hopf_lax(Lagrangian::quadratic());
  std::vector<double> err;
  for (std::size_t n : {1024, 2048}) {
    const Grid g(-4.0, 4.0, n);
    const auto h = GridFunction::sample(g, [](double x) { return -0.5 * x * x; });
    const auto exact = GridFunction::sample(g, [](double x) { return -x * x / 4.0; });
    err.push_back(dist(hl.evolve(1.0, h), exact, Norm::Sup));
    o.detail << "n=" << n << " err=" << fmt(err.back()) << " (5dx=" << fmt(5.0 * g.dx()) << "); ";
    o.require(err.back() <= 5.0 * g.dx(), "error <= 5 dx at n=" + std::to_string(n));
  }
  o.detail << "ratio=" << fmt(err[1] / err[0]);
  o.require(err[1] <= 0.6 * err[0], "err(2048) <= 0.6 err(1024)");
}

// -- 4 ---------------------------------------------------------------------

void sup_contraction(Outcome& o) {
  const Grid g(-4.0, 4.0, 256);
  SampleOptions smooth;
  smooth.families = {SampleFamily::SmoothBump, SampleFamily::PiecewiseLinear};
  SampleGenerator gen(14, smooth);
  const auto pairs = gen.pairs(g, 200);

  // Lax-Friedrichs needs alpha >= |H'(p)| = |p| on every input and output.
  double slope = 0.0;
  for (const auto& [f, h] : pairs) slope = std::max({slope, max_slope(f), max_slope(h)});
  const double alpha = std::exp2(std::ceil(std::log2(slope)) + 1.0);
  LaxFriedrichsOptions lf;
  lf.artificial_viscosity = alpha;

  const auto zero = GridFunction::constant(g, 0.0);
  const std::vector<std::pair<SemigroupOperator, std::vector<double>>> ops{
      {make_hopf_lax(Lagrangian::quadratic()), {0.1, 0.5, 1.0}},
      {make_lax_friedrichs(Hamiltonian::quadratic(), lf), {0.1, 0.5, 1.0}},
      {make_hjb(ControlProblem::integrator(g, zero, 2.0)), {0.5, 1.0, 2.0}},
  };
  for (const auto& [op, times] : ops) {
    double worst = 0.0;
    for (double t : times) worst = std::max(worst, lip_seminorm_estimate(op, t, pairs, Norm::Sup));
    o.detail << op.label() << " lip=" << fmt(worst) << "; ";
    o.require(worst <= 1.0 + 1e-10, op.label() + " Lipschitz <= 1 + 1e-10");
  }
  o.detail << "LF alpha=" << alpha;
}

// -- 5 ---------------------------------------------------------------------

void conservation(Outcome& o) {
  const auto burgers = FluxFunction::burgers();
  const Grid g(-4.0, 4.0, 512, true);
  SampleGenerator gen(15);
  double worst_drift = 0.0;
  for (int k = 0; k < 4; ++k) {
    GridFunction u = gen.function(g);
    const double m0 = mass_integral(u);
    const double dt = 0.9 * g.dx() / std::max(1.0, norm_sup(u));
    for (int s = 0; s < 1000; ++s) u = godunov_step(burgers, u, dt);
    worst_drift = std::max(worst_drift, std::abs(mass_integral(u) - m0));
  }
  o.detail << "mass drift per 1000 steps=" << fmt(worst_drift) << " (bound " << fmt(1e-12 * g.n()) << "); ";
  o.require(worst_drift <= 1e-12 * static_cast<double>(g.n()), "mass drift");

  const auto op = make_godunov(burgers, {-1.0, 1.0});
  double worst_excess = 0.0;
  for (const auto& [f, h] : gen.pairs(g, 100)) {
    const double scale = std::max({1.0, norm_l1(f), norm_l1(h)});
    const double d0 = dist(f, h, Norm::L1);
    for (double t : {0.25, 1.0})
      worst_excess = std::max(worst_excess, (dist(op.evolve(t, f), op.evolve(t, h), Norm::L1) - d0) / scale);
  }
  o.detail << "L1 excess / scale=" << fmt(worst_excess);
  o.require(worst_excess <= 1e-12, "L1 contraction");
}

// -- 6 ---------------------------------------------------------------------

GridFunction riemann(const Grid& g, double left, double right) {
  return GridFunction::sample(g, [=](double x) { return x < 0.0 ? left : right; });
}

double rarefaction_error(std::size_t n, double cfl) {
  const Grid g(-2.0, 2.0, n, true);
  const auto u = evolve_cl(FluxFunction::burgers(), riemann(g, 0.0, 1.0), 1.0, cfl);
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g.x(i);
    if (x < -1.0 || x > 1.75) continue;  // away from the shock formed at the periodic seam
    err = std::max(err, std::abs(u.value(i) - std::clamp(x, 0.0, 1.0)));
  }
  return err;
}

void entropy_benchmarks(Outcome& o) {
  for (std::size_t n : {256, 512, 1024}) {
    const Grid g(-2.0, 2.0, n, true);
    const auto u = evolve_cl(FluxFunction::burgers(), riemann(g, 1.0, 0.0), 1.0);
    double pos = std::nan("");
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double a = u.value(i) - 0.5, b = u.value(i + 1) - 0.5;
      if (g.x(i) > -0.5 && g.x(i + 1) < 1.5 && (a > 0.0) != (b > 0.0)) {
        pos = g.x(i) + g.dx() * a / (a - b);
        break;
      }
    }
    o.detail << "shock n=" << n << " |x-0.5|=" << fmt(std::abs(pos - 0.5)) << "; ";
    o.require(std::abs(pos - 0.5) <= 2.0 * g.dx(), "shock position at n=" + std::to_string(n));
  }

  // C = err / (dx log n) must be stable to 10% across two refinements.
  auto constants = [](double cfl) {
    std::vector<double> c;
    for (std::size_t n : {1024, 2048, 4096}) {
      const double dx = 4.0 / static_cast<double>(n);
      c.push_back(rarefaction_error(n, cfl) / (dx * std::log(static_cast<double>(n))));
    }
    return c;
  };
  const auto c = constants(0.9);
  o.detail << "rarefaction C at cfl 0.9 (n=1024,2048,4096): " << fmt(c[0]) << " " << fmt(c[1]) << " " << fmt(c[2]);
  for (std::size_t k = 1; k < c.size(); ++k)
    o.require(std::abs(c[k] / c[k - 1] - 1.0) <= 0.1, "C stable within 10% at refinement " + std::to_string(k));
  if (!o.pass) {
    const auto c1 = constants(1.0);
    o.detail << "; diagnostic at cfl 1.0: " << fmt(c1[0]) << " " << fmt(c1[1]) << " " << fmt(c1[2]);
  }
}

// -- 7 ---------------------------------------------------------------------

void kruzkov_detector(Outcome& o) {
  const auto burgers = FluxFunction::burgers();
  const double rt = 0.5;
  std::vector<double> expansion;
  for (std::size_t n : {256, 512, 1024}) {
    const Grid g(-2.0, 2.0, n, true);
    const auto steps = static_cast<std::size_t>(std::ceil(1.0 / (0.5 * g.dx())));
    const auto shock = cl_trajectory(burgers, riemann(g, 1.0, 0.0), 1.0, steps);
    const double entropy =
        kruzkov_residual(burgers, shock, 0.5, sample_on(shock, bump_test_function(0.5, rt, 0.25, 0.75)));
    o.require(entropy >= -g.dx(), "entropy residual >= -dx at n=" + std::to_string(n));
    // A stationary upward jump is a weak solution that violates the entropy condition.
    const auto fake = sample_on(shock, [](double, double x) { return x < 0.0 ? 0.0 : 1.0; });
    expansion.push_back(
        kruzkov_residual(burgers, fake, 0.5, sample_on(shock, bump_test_function(0.5, rt, 0.0, 0.75))));
    o.detail << "n=" << n << " shock=" << fmt(entropy) << " expansion=" << fmt(expansion.back()) << "; ";
  }
  for (double r : expansion) o.require(r < 0.0, "expansion residual negative");
  o.require(std::abs(expansion.back()) >= 0.9 * std::abs(expansion.front()), "expansion residual bounded away from 0");
}

// -- 8 ---------------------------------------------------------------------

void generator_counterexample(Outcome& o) {
  const auto r = generator_max_additivity_counterexample(2049, 1e-3);
  // Independent oracle: f' - g' at x = -1/4 for f = exp(-2x^2), g = exp(-x^2).
  const double x = -0.25;
  const double oracle = -4.0 * x * std::exp(-2.0 * x * x) + 2.0 * x * std::exp(-x * x);
  o.detail << "witness x=" << fmt(r.witness_x) << " gap=" << fmt(r.gap) << " oracle=" << fmt(oracle)
           << " rel_err=" << fmt(std::abs(r.gap - oracle) / oracle);
  o.require(r.ordered, "f <= g everywhere");
  o.require(r.join_is_g, "f (+) g = g");
  o.require(std::abs(r.witness_x - x) <= 0.01, "witness near -0.25");
  o.require(r.gap >= 0.4, "gap >= 0.4");
  o.require(std::abs(r.gap - oracle) <= 0.05 * oracle, "gap within 5% of the analytic value");
}

// -- 9 ---------------------------------------------------------------------

void hjb_consistency(Outcome& o) {
  std::vector<double> distances;
  for (std::size_t n : {128, 256, 512}) {
    const Grid g(-4.0, 4.0, n);
    const auto phi = GridFunction::sample(g, [](double x) { return -x * x; });
    const auto problem = ControlProblem::integrator(g, phi, 2.0);
    const auto v = evolve_hjb(problem, phi, 1.0);
    // Windowed max of phi over [x - 1, x + 1].
    const auto oracle = GridFunction::sample(g, [](double x) {
      const double d = std::max(0.0, std::abs(x) - 1.0);
      return -d * d;
    });
    const double dt = 1.0 / std::ceil(1.0 / g.dx());  // cfl 1, unit speed
    const double err = dist(v, oracle, Norm::Sup);
    distances.push_back(hj_consistency_check(problem, phi, 1.0));
    o.detail << "n=" << n << " oracle_err=" << fmt(err) << " consistency=" << fmt(distances.back()) << "; ";
    o.require(err <= 3.0 * (g.dx() + dt), "windowed-max oracle at n=" + std::to_string(n));
  }
  for (std::size_t k = 1; k < distances.size(); ++k)
    o.require(distances[k] <= distances[k - 1], "consistency distance non-increasing");
}

// -- 10 --------------------------------------------------------------------

void constructions(Outcome& o) {
  const Grid g(-4.0, 4.0, 256);
  SampleGenerator gen(20);
  std::vector<FunctionPair> pairs;
  std::vector<GridFunction> singles;
  for (int k = 0; k < 16; ++k) {
    pairs.emplace_back(gen.dyadic_function(g), gen.dyadic_function(g));
    singles.push_back(gen.dyadic_function(g));
  }
  const auto hl = make_hopf_lax(Lagrangian::quadratic());
  const auto shifted = rescale(hl, 1.0, 0.5, RescaleVariant::Additive);
  bool identical = true;
  for (double t : {0.25, 0.5, 1.0}) {
    identical = identical && defect_max_additivity(shifted, t, pairs).defect == defect_max_additivity(hl, t, pairs).defect;
    identical = identical && defect_plus_homogeneity(shifted, t, MaxScalar(0.5), singles).defect ==
                                 defect_plus_homogeneity(hl, t, MaxScalar(0.5), singles).defect;
  }
  o.require(identical, "additive rescale defects bit-identical");

  // Identity semigroup, beta = 1, f = 1, a = 1, t = 1: 2e against 1 + e.
  const auto mul = rescale(identity_semigroup(), 1.0, 1.0, RescaleVariant::Multiplicative);
  const double defect =
      defect_plus_homogeneity(mul, 1.0, MaxScalar(1.0), std::vector{GridFunction::constant(g, 1.0)}).defect;
  o.detail << "additive defects identical=" << (identical ? "yes" : "no") << "; multiplicative defect=" << fmt(defect)
           << "; quotient:";
  o.require(std::abs(defect - (std::numbers::e - 1.0)) <= 1e-12, "multiplicative defect e - 1");

  for (const auto& in : tools::quotient_demo_instances()) {
    const auto r = quotient_equivalent(in.f1, in.f2, in.d);
    o.detail << " " << in.name << "=" << to_string(r.status);
    o.require(r.status == in.expected, in.name + " verdict");
    if (r.status == QuotientStatus::Equivalent) {
      const bool witnessed = r.g1 && r.g2 && *r.g1 == in.d.combine(r.a) && *r.g2 == in.d.combine(r.b) &&
                             vec_oplus(in.f1, *r.g1) == vec_oplus(in.f2, *r.g2);
      o.require(witnessed, in.name + " witness");
    }
  }
}

// -- 11 --------------------------------------------------------------------

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

void erratum_sensitivity(Outcome& o, const fs::path& out) {
  const fs::path configs{MPSG_CONFIG_DIR};
  const auto hl_dir = out / "erratum" / "hopf_lax";
  const auto gd_dir = out / "erratum" / "godunov";
  tools::run_experiment(tools::Command::Check, tools::load_config(configs / "hopf_lax_linearity.ini"), hl_dir);
  tools::run_experiment(tools::Command::Check, tools::load_config(configs / "godunov_max_additivity.ini"), gd_dir);

  bool hl_exact = false;
  for (const auto& row : csv_rows(hl_dir / "convergence.csv"))
    if (row[0] == "MAX_ADDITIVITY") hl_exact = row[8] == "EXACT";
  o.require(hl_exact, "Hopf-Lax max-additivity EXACT");
  o.detail << "Hopf-Lax max-additivity " << (hl_exact ? "EXACT" : "not EXACT") << "; Godunov curve (n:defect)";
  std::size_t points = 0;
  std::string verdict;
  for (const auto& row : csv_rows(gd_dir / "convergence.csv")) {
    if (row[0] != "MAX_ADDITIVITY") continue;
    o.detail << " " << row[2] << ":" << row[6];
    verdict = row[8];
    ++points;
  }
  o.detail << " verdict " << verdict;
  o.require(points >= 2, "refinement-tracked Godunov curve");
}

// -- 12 --------------------------------------------------------------------

void run_suite(const fs::path& dir) {
  const fs::path configs{MPSG_CONFIG_DIR};
  using tools::Command;
  const std::vector<std::pair<std::string, Command>> runs{
      {"hopf_lax_linearity", Command::Check},        {"godunov_homogeneity", Command::Check},
      {"godunov_max_additivity", Command::Check},    {"hjb_integrator", Command::Check},
      {"hj_quadratic_evolve", Command::Evolve},      {"translation_generator", Command::Generator},
      {"lax_friedrichs_resolvent", Command::Resolvent}, {"hopf_lax_linearity", Command::Convergence},
  };
  for (const auto& [name, command] : runs) {
    auto config = tools::load_config(configs / (name + ".ini"));
    if (command == Command::Convergence) config.levels = 3;
    tools::run_experiment(command, config, dir / (name + "." + std::string(tools::to_string(command))));
  }
  tools::run_experiment(Command::QuotientDemo, {}, dir / "quotient-demo");
}

void determinism(Outcome& o, const fs::path& out) {
  const auto a = out / "determinism" / "run1";
  const auto b = out / "determinism" / "run2";
  fs::remove_all(a);
  fs::remove_all(b);
  run_suite(a);
  run_suite(b);
  std::size_t files = 0, csvs = 0, differing = 0;
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    ++files;
    if (entry.path().extension() == ".csv") ++csvs;
    const auto twin = b / fs::relative(entry.path(), a);
    if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) {
      ++differing;
      o.detail << " differs: " << fs::relative(entry.path(), a).string();
    }
  }
  o.detail << files << " files (" << csvs << " CSV) compared, " << differing << " differ";
  o.require(csvs > 0 && differing == 0, "byte-identical outputs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::string out_dir = "acceptance_out";
  app.add_option("--out", out_dir, "Directory for experiment outputs")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  const fs::path out(out_dir);
  fs::create_directories(out);

  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"algebra exactness", algebra_exactness},
      {"Hopf-Lax max-plus linearity", hopf_lax_linearity},
      {"Hopf-Lax quadratic benchmark", hopf_lax_benchmark},
      {"sup-norm contraction", sup_contraction},
      {"conservation and L1 contraction", conservation},
      {"entropy benchmarks", entropy_benchmarks},
      {"Kruzkov detector", kruzkov_detector},
      {"generator counterexample", generator_counterexample},
      {"HJB consistency", hjb_consistency},
      {"constructions", constructions},
      {"erratum sensitivity", [&](Outcome& o) { erratum_sensitivity(o, out); }},
      {"determinism", [&](Outcome& o) { determinism(o, out); }},
  };

  std::ofstream summary(out / "acceptance.txt");
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failed += o.pass ? 0 : 1;
    std::string detail = o.detail.str();
    while (detail.ends_with(' ') || detail.ends_with(';')) detail.pop_back();
    const std::string line =
        (o.pass ? "PASS " : "FAIL ") + std::to_string(k + 1) + " " + criteria[k].first + ": " + detail;
    std::cout << line << std::endl;
    summary << line << '\n';
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
