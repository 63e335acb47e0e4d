#pragma once

#include <string>
#include <vector>

#include "cavitylink/config.hpp"

namespace cavitylink {

enum class Scenario {
  single,     // one driven cavity, closed-form cross-check columns
  local,      // full two-cavity master equation, bare-mode basis
  common,     // same dynamics in the collective basis
  effective,  // one-mode model after fiber elimination
  rates,      // closed rate system vs full solve
  sweep,      // decoupling ratio vs fiber damping (and phase)
  calibrate,  // fiber emission vs drive ratio phase
  validate,   // regime / parameter sanity report
};

Scenario parse_scenario(const std::string& name);  // throws std::invalid_argument
std::string scenario_name(Scenario s);

struct RunOptions {
  Scenario scenario = Scenario::single;
  RunConfig config;
  std::string out_dir = ".";
  std::string format = "csv";  // "csv" or "csv+svg"
  std::string config_path;     // recorded in output metadata
};

struct RunArtifact {
  std::string path;
  std::string kind;  // "csv" or "svg"
};

struct RunReport {
  std::vector<RunArtifact> artifacts;
  std::vector<std::string> log;  // one line per notable step, echoed by the CLI
};

/// Executes a scenario end to end and writes its artifacts. All numeric
/// output is formatted deterministically; rerunning with the same config and
/// seed reproduces every byte. Solver failures raise std::runtime_error.
RunReport run_scenario(const RunOptions& options);

/// Deterministic CSV writer shared by all scenarios: '#' metadata lines
/// (tool version, scenario, resolved config, seed), then a header row and
/// '%.12g' formatted values.
std::string render_csv(const RunOptions& options,
                       const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& rows);

/// Minimal standalone line plot (polyline per y-column against column 0).
std::string render_svg(const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& rows);

}  // namespace cavitylink
