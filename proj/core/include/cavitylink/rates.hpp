#pragma once

#include "cavitylink/frame.hpp"

namespace cavitylink {

/// Classical rate-equation variables for the common-mode pair. The k/l
/// entries are drive-normalized quadratures and are defined only when the
/// respective |omega_a|, |omega_b| are nonzero.
struct RateState {
  double n_a = 0, n_b = 0;  // photon numbers
  double k_a = 0, k_b = 0;  // drive-aligned field quadratures
  double m = 0;             // damping-weighted mode coherence
  double l_a = 0, l_b = 0;  // cross quadratures
};

/// Time derivative of the seven-variable system. The system is linear and
/// closed; for this model it is exact, not an approximation. Throws
/// std::domain_error when |omega_a| = 0 or |omega_b| = 0 (use the moment
/// formulation below, which has no normalizers).
RateState rate_rhs(const RateState& state, const SystemParams& params);

struct RateSolution {
  double n_a = 0, n_b = 0;
  double ratio = 0;             // n_b / n_a
  bool ratio_infinite = false;  // n_a = 0 with n_b > 0
  bool quadratures_defined = false;  // both drive normalizers nonzero
  RateState state;  // k/l entries are NaN when !quadratures_defined
};

/// Steady state of the rate system, solved exactly as a linear system.
/// Falls back to the normalizer-free moment formulation automatically when
/// a drive component vanishes. Throws std::domain_error when a damping rate
/// vanishes on a driven mode (no steady state), naming the rate.
RateSolution rate_steady_state(const SystemParams& params);

/// First and second moments of the common-mode pair; closed and exact.
struct MomentState {
  complexd c_a = 0, c_b = 0;   // field amplitudes <c_a>, <c_b>
  double n_a = 0, n_b = 0;     // <c^dag c>
  complexd coherence = 0;      // <c_b^dag c_a>
};

MomentState moment_rhs(const MomentState& state, const SystemParams& params);
MomentState moment_steady_state(const SystemParams& params);

/// Closed-form symmetric steady state (kappa1 = kappa2 = kappa,
/// |omega1| = |omega2| = omega, equal coupling magnitudes, relative phase
/// phi): n_a = (1-cos phi) omega^2/kappa^2, n_b = (1+cos phi) omega^2/
/// (kappa+kappa_m)^2. cos phi = 1 flags the ratio as infinite rather than
/// throwing.
struct SymmetricSteady {
  double n_a = 0, n_b = 0;
  double ratio = 0;
  bool ratio_infinite = false;
};
SymmetricSteady symmetric_steady(double omega, double kappa, double kappa_m, double phi);

}  // namespace cavitylink
