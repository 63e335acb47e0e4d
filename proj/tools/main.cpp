// cavitylink: steady states, dynamics, and quantum trajectories for two
// driven cavities coupled through a lossy fiber mode.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cavitylink/config.hpp"
#include "cavitylink/runner.hpp"
#include "cavitylink/version.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two fiber-coupled driven cavities: master equation, "
               "quantum trajectories, collective-mode analysis"};
  app.set_version_flag("--version", std::string("cavitylink ") + cavitylink::kVersion);

  std::string scenario_arg;
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = -1;

  app.add_option("scenario", scenario_arg,
                 "one of: single local common effective rates sweep calibrate validate")
      ->required();
  app.add_option("--config", config_path, "INI config file")->required();
  app.add_option("--out", out_dir, "output directory (default .)");
  app.add_option("--seed", seed, "override the config seed")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--format", format, "csv or csv+svg")
      ->check(CLI::IsMember({"csv", "csv+svg"}));
  app.add_option("--threads", threads, "trajectory worker count (0 = hardware)");

  CLI11_PARSE(app, argc, argv);

  cavitylink::RunOptions options;
  try {
    options.scenario = cavitylink::parse_scenario(scenario_arg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    options.config = cavitylink::parse_config(config_path);
  } catch (const cavitylink::ConfigError& e) {
    std::cerr << config_path << ":" << e.line() << ": " << e.key() << ": "
              << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return kExitConfig;
  }

  if (seed_given) options.config.seed = seed;
  if (threads >= 0) options.config.threads = threads;
  options.out_dir = out_dir;
  options.format = format;
  options.config_path = config_path;

  try {
    cavitylink::RunReport report = cavitylink::run_scenario(options);
    for (const auto& line : report.log) std::cout << line << "\n";
    for (const auto& artifact : report.artifacts)
      std::cout << "wrote " << artifact.path << "\n";
  } catch (const cavitylink::ConfigError& e) {
    std::cerr << "error: " << e.key() << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  return 0;
}
