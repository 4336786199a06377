#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "experiment.hpp"
#include "mpsg/conservation_law.hpp"
#include "mpsg/io.hpp"

using namespace mpsg;
using namespace mpsg::tools;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs{MPSG_CONFIG_DIR};

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mpsg_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Exit status of the installed binary.
int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MPSG_CLI_PATH + "\" " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
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

const std::string kMinimal = R"([operator]
name = hopf-lax
[grid]
n = 64
[initial]
samples = 4
[run]
times = 0.5
properties = MONOTONICITY
)";

}  // namespace

TEST_CASE("check on the Hopf-Lax config reports EXACT at every level") {
  const auto out = scratch("hopf_lax");
  const auto config = load_config(kConfigs / "hopf_lax_linearity.ini");
  CHECK(config.levels == 2);
  const auto result = run_experiment(Command::Check, config, out);
  CHECK(result.exit_code == 0);
  CHECK(result.mismatches.empty());
  const auto rows = csv_rows(out / "convergence.csv");
  REQUIRE(rows.size() == 1 + 2 * 9);
  CHECK(rows[0].back() == "study_verdict");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][7] == "EXACT");
    CHECK(rows[i][8] == "EXACT");
  }
  const auto props = csv_rows(out / "properties.csv");
  REQUIRE(props.size() == 10);
  for (std::size_t i = 1; i < props.size(); ++i) CHECK(props[i].back() == "EXACT");
}

TEST_CASE("a declared VIOLATED expectation is a match") {
  const auto out = scratch("godunov");
  const auto result = run_experiment(Command::Check, load_config(kConfigs / "godunov_homogeneity.ini"), out);
  CHECK(result.exit_code == 0);
  bool saw_violation = false;
  for (const auto& row : csv_rows(out / "properties.csv"))
    if (row[0] == "PLUS_HOMOGENEITY") saw_violation = row.back() == "VIOLATED";
  CHECK(saw_violation);
}

TEST_CASE("a wrong expectation gives exit code 1") {
  auto config = parse_config(kMinimal + "[expect]\nMONOTONICITY = VIOLATED\n");
  const auto result = run_experiment(Command::Check, config, scratch("mismatch"));
  CHECK(result.exit_code == 1);
  CHECK(result.mismatches.size() == 1);
}

TEST_CASE("config validation names the offending field") {
  auto field_of = [](const std::string& text) {
    try {
      (void)parse_config(text);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<accepted>");
  };
  CHECK(field_of(kMinimal) == "<accepted>");
  CHECK(field_of(kMinimal + "[bogus]\nx = 1\n") == "bogus");
  CHECK(field_of("[operator]\nname = hopf-lax\nspeling = 1\n") == "operator.speling");
  CHECK(field_of("[operator]\nname = warp-drive\n") == "operator.name");
  CHECK(field_of("[grid]\nn = 8\n") == "operator.name");
  CHECK(field_of(kMinimal + "[expect]\nNOT_A_PROPERTY = EXACT\n") == "expect.NOT_A_PROPERTY");
  CHECK(field_of(kMinimal + "[expect]\nMONOTONICITY = MAYBE\n") == "expect.MONOTONICITY");
  CHECK(field_of("[operator]\nname = hopf-lax\n[initial]\npreset = file\nfile = /nonexistent/f.txt\n") ==
        "initial.file");
  CHECK(field_of("[operator]\nname = hopf-lax\n[run]\ntimes = 0.5 -1\n") == "run.times");
  CHECK(field_of("[operator]\nname = hopf-lax\n[grid]\nxmin = 1\nxmax = 0\n") == "grid");
  CHECK(field_of("[operator]\nname = hopf-lax\n[grid]\nn = nan\n").starts_with("grid"));
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("an empty property list is rejected") {
  auto config = parse_config(kMinimal);
  config.properties.clear();
  try {
    run_experiment(Command::Check, config, scratch("empty"));
    FAIL("accepted an empty property list");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "run.properties");
  }
}

TEST_CASE("output is byte-identical across runs and sensitive to the seed") {
  const auto config = load_config(kConfigs / "godunov_homogeneity.ini");
  const auto a = scratch("det_a"), b = scratch("det_b");
  run_experiment(Command::Check, config, a);
  run_experiment(Command::Check, config, b);
  for (const char* file : {"properties.csv", "convergence.csv", "summary.txt"}) {
    INFO(file);
    CHECK(slurp(a / file) == slurp(b / file));
  }
  auto reseeded = config;
  reseeded.seed = 7;
  const auto c = scratch("det_c");
  run_experiment(Command::Check, reseeded, c);
  CHECK(slurp(a / "convergence.csv") != slurp(c / "convergence.csv"));
  CHECK(config_hash(config) != config_hash(reseeded));
  CHECK(config_hash(config) == config_hash(load_config(kConfigs / "godunov_homogeneity.ini")));
  CHECK(config_hash(config).size() == 16);
  CHECK(slurp(a / "properties.csv").starts_with("# mpsg 0.1.0 config=" + config_hash(config) + " seed=1\n"));
}

TEST_CASE("a datum read from a file evolves like the same datum in memory") {
  const auto dir = scratch("file_datum");
  const Grid g(-4.0, 4.0, 64);
  const auto f = GridFunction::sample(g, [](double x) { return -0.25 * x * x; });
  write_grid_function(dir / "h.txt", f);
  std::ofstream(dir / "run.ini") << "[operator]\nname = hopf-lax\n[grid]\nxmin = -4\nxmax = 4\nn = 64\n"
                                    "[initial]\npreset = file\nfile = h.txt\n[run]\ntimes = 0.5\n";
  const auto config = load_config(dir / "run.ini");
  const auto read_back = build_initial(config, g);
  CHECK(read_back == f);
  const auto out = dir / "out";
  const auto result = run_experiment(Command::Evolve, config, out);
  CHECK(result.exit_code == 0);
  const auto traj = read_trajectory(out / "trajectory.txt");
  REQUIRE(traj.size() == 2);
  CHECK(traj.snapshots[1] == build_operator(config, g).evolve(0.5, f));
}

TEST_CASE("binary exit codes") {
  const auto out = scratch("binary");
  const auto cfg = [](const char* name) { return "--config \"" + (kConfigs / name).string() + "\""; };
  CHECK(run_cli("check " + cfg("hopf_lax_linearity.ini") + " --out \"" + (out / "a").string() + "\"") == 0);
  CHECK(run_cli("check --config /nonexistent.ini --out \"" + (out / "b").string() + "\"") == 2);
  CHECK(run_cli("check --out \"" + (out / "c").string() + "\"") == 2);
  CHECK(run_cli("frobnicate") != 0);
  CHECK(run_cli("quotient-demo --out \"" + (out / "q").string() + "\"") == 0);
  CHECK(fs::exists(out / "q" / "quotient.csv"));

  std::ofstream(out / "wrong.ini") << kMinimal << "[expect]\nMONOTONICITY = VIOLATED\n";
  CHECK(run_cli("check --config \"" + (out / "wrong.ini").string() + "\" --out \"" + (out / "w").string() + "\"") == 1);

  // Several configs run side by side into per-stem directories.
  CHECK(run_cli("check " + cfg("hopf_lax_linearity.ini") + " " + cfg("godunov_homogeneity.ini") + " --levels 1 --out \"" +
                (out / "multi").string() + "\"") == 0);
  CHECK(fs::exists(out / "multi" / "hopf_lax_linearity" / "properties.csv"));
  CHECK(fs::exists(out / "multi" / "godunov_homogeneity" / "properties.csv"));
}
