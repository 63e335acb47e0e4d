#pragma once

#include <optional>
#include <vector>

#include "cavitylink/model.hpp"

namespace cavitylink {

/// Per-channel emission rates I_x = <R_x^dag R_x> plus mode populations in
/// both bases. n_1/n_2 are absent for one-mode representations.
struct EmissionReport {
  double i_1 = 0, i_2 = 0, i_m = 0;
  double total = 0;
  double n_a = 0, n_b = 0;
  std::optional<double> n_1, n_2;
};

EmissionReport emission_report(const QuantumState& state, const OpenSystemModel& model);

struct RatioResult {
  double value = 0;
  bool infinite = false;      // n_a = 0, n_b > 0
  bool undefined = false;     // n_a = n_b = 0
};

/// n_b / n_a, the figure of merit for fiber decoupling.
RatioResult decoupling_ratio(const EmissionReport& report);

struct CalibrationPoint {
  complexd ratio;  // omega1/omega2 at this grid point
  double i_m = 0;  // steady fiber emission rate
  double n_a = 0, n_b = 0;
};

struct CalibrationScan {
  std::vector<CalibrationPoint> points;
  int argmin = 0;  // index of minimal fiber emission
  int argmax = 0;
  complexd aligned_ratio;   // -xi2^*/xi1^*: sole dark-mode driving
  complexd antidark_ratio;  // xi1/xi2: sole fiber-mode driving
};

/// Sweeps omega1 = r * omega2 over the given ratio grid and records the
/// steady fiber emission per point. Requires omega2 != 0, nonzero xi1 and
/// xi2 (the reference ratios are undefined otherwise) and at least one
/// grid point (std::invalid_argument). cutoff 0 picks the recommendation
/// rule per point.
CalibrationScan calibration_scan(const SystemParams& base,
                                 const std::vector<complexd>& ratio_grid,
                                 int cutoff = 0);

}  // namespace cavitylink
