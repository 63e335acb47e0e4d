#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavitylink/frame.hpp"

namespace cavitylink {

/// Thrown on malformed config input. Carries enough context for the CLI to
/// print "file:line: [section.]key: what" and exit with the config error code.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string what, int line, std::string key)
      : std::runtime_error(std::move(what)), line_(line), key_(std::move(key)) {}
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Inclusive numeric grid, parsed from "start:stop:step".
struct Grid {
  double start = 0, stop = 0, step = 1;
  std::vector<double> values() const;
};

struct RunConfig {
  SystemParams params;

  // [simulation]
  int cutoff = 0;            // 0: use the recommendation rule
  double t_final = 10.0;
  int n_samples = 101;
  double dt = 0.0;           // 0: auto (mcwf fixed step / master step cap)
  int trajectories = 2000;
  std::uint64_t seed = 1;
  int threads = 0;           // 0: hardware default

  // [sweep]
  std::optional<Grid> kappa_m_grid;       // in units of kappa1
  std::optional<Grid> phi_grid;           // coupling phase values
  std::optional<Grid> drive_ratio_phase;  // calibrate: arg(omega1/omega2)

  // [regime]
  std::optional<double> fiber_length_m;
  std::optional<double> kappa0_per_s;
};

/// Parses an INI-style config: [section] headers, key = value lines, '#' or
/// ';' comments, blank lines ignored. Unknown sections or keys raise
/// ConfigError, as do unparseable values. Complex values accept "a+bi",
/// "a-bi", plain reals, and "i"/"-i" shorthands.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& label = "<string>");

complexd parse_complex(const std::string& text);  // throws std::invalid_argument

/// Serializes the fully resolved configuration as "# key = value" comment
/// lines for reproducible CSV headers.
std::string render_config(const RunConfig& config);

}  // namespace cavitylink
