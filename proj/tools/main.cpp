#include <CLI11.hpp>

#include <future>
#include <iostream>
#include <map>

#include "experiment.hpp"
#include "mpsg/version.hpp"

namespace {

using mpsg::tools::Command;

int run_one(Command command, const std::string& config_path, const std::filesystem::path& out,
            std::optional<std::uint64_t> seed, std::optional<std::size_t> levels, std::ostream& log) {
  try {
    mpsg::tools::ExperimentConfig config;
    if (config_path.empty()) {
      if (command != Command::QuotientDemo) throw mpsg::tools::ConfigError("--config", "required");
    } else {
      config = mpsg::tools::load_config(config_path);
    }
    if (seed) config.seed = *seed;
    if (levels) {
      if (*levels == 0) throw mpsg::tools::ConfigError("--levels", "must be at least 1");
      config.levels = *levels;
    } else if (command == Command::Convergence && config.levels < 2) {
      config.levels = 3;
    }
    const auto result = mpsg::tools::run_experiment(command, config, out);
    for (const auto& path : result.written) log << "wrote " << path << '\n';
    for (const auto& m : result.mismatches) log << "expectation mismatch: " << m << '\n';
    return result.exit_code;
  } catch (const mpsg::tools::ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    log << "error (" << (config_path.empty() ? "built-in" : config_path) << "): " << e.what() << '\n';
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-plus semigroup experiment runner"};
  app.set_version_flag("--version", std::string(mpsg::kVersion));
  app.require_subcommand(1);

  std::vector<std::string> configs;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> levels;

  const std::map<std::string, std::pair<Command, std::string>> commands{
      {"evolve", {Command::Evolve, "Evolve the initial datum and dump the trajectory"}},
      {"check", {Command::Check, "Run the property suite"}},
      {"generator", {Command::Generator, "Estimate the generator on the initial datum"}},
      {"resolvent", {Command::Resolvent, "Probe dissipativity through the discrete resolvent"}},
      {"quotient-demo", {Command::QuotientDemo, "Decide equivalence in finite max-plus quotients"}},
      {"convergence", {Command::Convergence, "Property suite under grid refinement"}},
  };
  for (const auto& [name, spec] : commands) {
    auto* sub = app.add_subcommand(name, spec.second);
    sub->add_option("--config", configs, "Experiment config; several run concurrently into <out>/<stem>");
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Override the sample seed");
    sub->add_option("--levels", levels, "Override the refinement level count");
  }

  CLI11_PARSE(app, argc, argv);

  Command command = Command::Check;
  for (const auto& [name, spec] : commands)
    if (app.got_subcommand(name)) command = spec.first;

  if (configs.size() <= 1) {
    return run_one(command, configs.empty() ? std::string{} : configs.front(), out_dir, seed, levels, std::cerr);
  }

  std::vector<std::future<std::pair<int, std::string>>> jobs;
  for (const auto& path : configs) {
    jobs.push_back(std::async(std::launch::async, [&, path] {
      std::ostringstream log;
      const auto dir = std::filesystem::path(out_dir) / std::filesystem::path(path).stem();
      const int code = run_one(command, path, dir, seed, levels, log);
      return std::make_pair(code, log.str());
    }));
  }
  int worst = 0;
  for (auto& job : jobs) {
    auto [code, log] = job.get();
    std::cerr << log;
    worst = std::max(worst, code);
  }
  return worst;
}
