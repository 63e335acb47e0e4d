#pragma once

#include <string>
#include <vector>

#include "cavitylink/fock.hpp"
#include "cavitylink/frame.hpp"

namespace cavitylink {

enum class Representation { single, local, common, effective };

struct JumpOperator {
  std::string label;  // "1", "2", "m"
  Operator op;
};

/// Open-system model: non-Hermitian conditional Hamiltonian plus the jump
/// operators whose rates it absorbs, H - H^dag = -i sum_x R_x^dag R_x.
struct OpenSystemModel {
  Representation representation = Representation::single;
  FockSpace space;
  Operator h_cond;
  std::vector<JumpOperator> jumps;
  SystemParams params;  // parameters the model was built from
};

/// One laser-driven leaky cavity: drive omega, photon decay kappa.
OpenSystemModel build_single_cavity(complexd omega, double kappa, int cutoff);

/// Two cavities in the local mode basis (c_1, c_2) with the fiber loss
/// expressed through the collective combination xi1 c_1 + xi2 c_2.
OpenSystemModel build_local(const SystemParams& params, int cutoff);

/// Same system rotated to the common-mode basis (c_a, c_b).
OpenSystemModel build_common(const SystemParams& params, int cutoff);

/// Single-mode model of the fiber-dark mode after adiabatic elimination of
/// the overdamped mode; requires kappa_m > 0 (throws std::domain_error).
/// The conditional decay equals the summed channel rates, so the generator
/// is exactly trace-preserving even though the rates themselves are
/// first-order in 1/kappa_m.
OpenSystemModel build_effective(const SystemParams& params, int cutoff);

/// Largest per-step transition-rate scale of the model (drives plus total
/// decay rates); used for integrator step bounds.
double rate_scale(const OpenSystemModel& model);

/// Cutoff recommendation for the model's steady regime: applies the coherent
/// tail rule to the total steady amplitude estimate.
int recommended_cutoff_for(const SystemParams& params);

}  // namespace cavitylink
