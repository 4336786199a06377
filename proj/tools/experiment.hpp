#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpsg/constructions.hpp"
#include "mpsg/grid.hpp"
#include "mpsg/semigroup.hpp"

namespace mpsg::tools {

/// Invalid configuration; the message starts with the field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Declared outcome for a property. HOLDS accepts EXACT or
/// WITHIN_SCHEME_ERROR; ANY accepts every verdict.
enum class Expectation { Exact, WithinSchemeError, Holds, Violated, Any };

Expectation parse_expectation(const std::string& s);
std::string_view to_string(Expectation e) noexcept;
bool matches(Expectation e, Verdict v) noexcept;

struct ExperimentConfig {
  /// Raw text and directory of the config file; files are resolved relative to it.
  std::string text;
  std::filesystem::path base_dir;

  // [operator]
  std::string op_name;
  std::string direction = "left";
  std::string hamiltonian = "quadratic";
  std::filesystem::path hamiltonian_table;
  std::string flux = "burgers";
  double flux_speed = 1.0;
  double state_min = -2.0;
  double state_max = 2.0;
  std::optional<double> cfl;
  double viscosity = 2.0;
  bool enforce_monotonicity = true;
  std::string problem = "integrator";
  std::size_t controls = 33;
  double control_min = -1.0;
  double control_max = 1.0;
  double reward = 0.0;
  double control_cost = 0.0;
  double horizon = 2.0;
  std::filesystem::path control_table;
  std::string rescale = "none";
  double rescale_alpha = 1.0;
  double rescale_beta = 0.0;

  // [grid]
  Grid grid{-4.0, 4.0, 256, false};

  // [initial]
  std::string initial = "gaussian";
  std::filesystem::path initial_file;
  std::size_t samples = 16;
  std::vector<SampleFamily> families{SampleFamily::SmoothBump, SampleFamily::PiecewiseConstant,
                                     SampleFamily::PiecewiseLinear};
  bool dyadic = false;
  bool riemann_pairs = false;
  double amplitude = 1.0;

  // [run]
  std::vector<double> times{0.5};
  std::vector<Property> properties;
  std::optional<Norm> norm;
  std::uint64_t seed = 1;
  std::size_t levels = 1;
  double shift = 2.5;
  double law_s = 0.5;
  double omega = 0.0;
  ErrorBudget budget;
  std::vector<double> t_seq{4e-3, 2e-3, 1e-3};
  int richardson_order = 1;
  std::string generator_exact = "none";
  bool counterexample = false;
  double resolvent_alpha = 0.1;
  double resolvent_dt = 0.01;

  // [expect]
  std::map<Property, Expectation> expect;
};

/// Parses an INI file ([operator], [grid], [initial], [run], [expect]) and
/// checks every name and file it references. Unknown sections or keys are
/// rejected.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");

/// Operator described by the [operator] section, built for `grid`.
SemigroupOperator build_operator(const ExperimentConfig& config, const Grid& grid);

/// Initial datum of the [initial] section sampled on `grid`.
GridFunction build_initial(const ExperimentConfig& config, const Grid& grid);

enum class Command { Evolve, Check, Generator, Resolvent, QuotientDemo, Convergence };
std::string_view to_string(Command c) noexcept;

struct RunResult {
  /// 0 when every verdict matched its expectation, 1 otherwise.
  int exit_code = 0;
  std::vector<std::string> written;
  std::vector<std::string> mismatches;
};

/// Runs one subcommand and writes its artifacts into out_dir. Output bytes
/// depend only on the config text, seed and levels.
RunResult run_experiment(Command command, const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Fixed instances decided by the quotient-demo subcommand.
struct QuotientInstance {
  std::string name;
  FiniteMaxVector f1;
  FiniteMaxVector f2;
  FiniteSubspace d;
  QuotientStatus expected;
};
std::vector<QuotientInstance> quotient_demo_instances();

/// 64-bit FNV-1a of the config text and the effective seed and level count.
std::string config_hash(const ExperimentConfig& config);

}  // namespace mpsg::tools
