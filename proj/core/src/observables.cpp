#include "cavitylink/observables.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cavitylink/master.hpp"

namespace cavitylink {

namespace {

double mode_population(const Operator& combo, const QuantumState& state) {
  return expectation(compose(adjoint(combo), combo), state).real();
}

}  // namespace

EmissionReport emission_report(const QuantumState& state, const OpenSystemModel& model) {
  if (!(state.space == model.space))
    throw std::invalid_argument("state and model live in different spaces");

  EmissionReport report;
  for (const auto& jump : model.jumps) {
    double rate = expectation(compose(adjoint(jump.op), jump.op), state).real();
    report.total += rate;
    if (jump.label == "1")
      report.i_1 += rate;
    else if (jump.label == "2")
      report.i_2 += rate;
    else if (jump.label == "m")
      report.i_m += rate;
  }

  const FockSpace& space = model.space;
  if (space.n_modes == 1) {
    // One-mode models track the fiber-dark combination (or the lone cavity,
    // which plays the same role); the other populations are not resolvable.
    report.n_a = expectation(number_operator(space, 0), state).real();
    report.n_b = 0.0;
    return report;
  }

  CommonModeFrame frame = make_frame(model.params);
  complexd x1 = model.params.xi1 / frame.xi;
  complexd x2 = model.params.xi2 / frame.xi;
  if (model.representation == Representation::common) {
    report.n_a = expectation(number_operator(space, 0), state).real();
    report.n_b = expectation(number_operator(space, 1), state).real();
    Operator c1 = mode_combination(space, {x2, std::conj(x1)});
    Operator c2 = mode_combination(space, {-x1, std::conj(x2)});
    report.n_1 = mode_population(c1, state);
    report.n_2 = mode_population(c2, state);
  } else {
    Operator ca = mode_combination(space, {std::conj(x2), -std::conj(x1)});
    Operator cb = mode_combination(space, {x1, x2});
    report.n_a = mode_population(ca, state);
    report.n_b = mode_population(cb, state);
    report.n_1 = expectation(number_operator(space, 0), state).real();
    report.n_2 = expectation(number_operator(space, 1), state).real();
  }
  return report;
}

RatioResult decoupling_ratio(const EmissionReport& report) {
  RatioResult result;
  const double tiny = 1e-14;
  if (report.n_a <= tiny && report.n_b <= tiny) {
    result.undefined = true;
    return result;
  }
  if (report.n_a <= tiny || report.n_a < 1e-12 * report.n_b) {
    result.infinite = true;
    result.value = std::numeric_limits<double>::infinity();
    return result;
  }
  result.value = report.n_b / report.n_a;
  return result;
}

CalibrationScan calibration_scan(const SystemParams& base,
                                 const std::vector<complexd>& ratio_grid,
                                 int cutoff) {
  if (ratio_grid.empty())
    throw std::invalid_argument("calibration needs at least one ratio");
  if (std::abs(base.omega2) == 0.0)
    throw std::invalid_argument("calibration sweeps omega1 = r omega2, so omega2 must be nonzero");
  if (std::abs(base.xi1) == 0.0 || std::abs(base.xi2) == 0.0)
    throw std::invalid_argument("reference ratios need nonzero xi1 and xi2");

  CalibrationScan scan;
  scan.aligned_ratio = -std::conj(base.xi2) / std::conj(base.xi1);
  scan.antidark_ratio = base.xi1 / base.xi2;
  scan.points.reserve(ratio_grid.size());

  for (std::size_t k = 0; k < ratio_grid.size(); ++k) {
    SystemParams p = base;
    p.omega1 = ratio_grid[k] * base.omega2;
    int n = cutoff > 0 ? cutoff : recommended_cutoff_for(p);
    // The common basis keeps the dark point exactly dark at any cutoff; the
    // local basis would leak a truncation residue into n_b.
    OpenSystemModel model = build_common(p, n);
    SteadyStateResult steady = steady_state(model);
    EmissionReport report = emission_report(steady.rho, model);

    CalibrationPoint point;
    point.ratio = ratio_grid[k];
    point.i_m = report.i_m;
    point.n_a = report.n_a;
    point.n_b = report.n_b;
    scan.points.push_back(point);

    int i = static_cast<int>(k);
    if (point.i_m < scan.points[scan.argmin].i_m) scan.argmin = i;
    if (point.i_m > scan.points[scan.argmax].i_m) scan.argmax = i;
  }
  return scan;
}

}  // namespace cavitylink
