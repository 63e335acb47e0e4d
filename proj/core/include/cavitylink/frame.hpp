#pragma once

#include <optional>

#include "cavitylink/fock.hpp"

namespace cavitylink {

/// Two driven cavities coupled by a lossy fiber channel. All rates share one
/// unit (the reference rate kappa0); Rabi frequencies and fiber couplings are
/// complex.
struct SystemParams {
  double kappa1 = 1.0;   // cavity 1 leak rate, >= 0
  double kappa2 = 1.0;   // cavity 2 leak rate, >= 0
  double kappa_m = 0.0;  // fiber damping rate, >= 0
  complexd omega1 = 0.0;  // laser drive on cavity 1
  complexd omega2 = 0.0;  // laser drive on cavity 2
  complexd xi1 = 1.0;     // fiber coupling of cavity 1
  complexd xi2 = 1.0;     // fiber coupling of cavity 2
};

/// Derived quantities of the decoupled/coupled common-mode pair:
/// c_a = (xi2^* c_1 - xi1^* c_2)/xi (fiber-dark), c_b = (xi1 c_1 + xi2 c_2)/xi.
struct CommonModeFrame {
  double xi = 1.0;          // sqrt(|xi1|^2 + |xi2|^2)
  double phi = 0.0;         // generalized relative phase arg(xi2)-arg(xi1), in (-pi, pi]
  complexd omega_a = 0.0;
  complexd omega_b = 0.0;
  double kappa_a = 0.0;
  double kappa_b = 0.0;
  double delta_kappa = 0.0;  // kappa1 - kappa2
  /// First-order effective drive/decay of the fiber-dark mode after the
  /// overdamped mode is eliminated. Empty when kappa_m = 0.
  std::optional<complexd> omega_eff;
  std::optional<double> kappa_eff;
};

/// Throws std::invalid_argument when xi1 = xi2 = 0 or any rate is negative.
CommonModeFrame make_frame(const SystemParams& params);

/// One physical-regime check: measured headroom vs the required margin.
struct RegimeCheck {
  double ratio;   // headroom; passes when >= margin
  bool pass;
};

struct RegimeReport {
  RegimeCheck fiber_dominates;   // kappa_m vs max(kappa1, kappa2, |omega1|, |omega2|)
  RegimeCheck round_trip;        // fiber round-trip time vs 1/kappa_m
  RegimeCheck timescales;        // 1/kappa_m vs min cavity lifetime
  double margin;
  bool pass;                     // all three
};

/// Validates the fiber-elimination regime. Rates in params are in units of
/// kappa0_per_s; fiber_length_m converts the round-trip check to seconds.
RegimeReport validate_regime(const SystemParams& params, double fiber_length_m,
                             double kappa0_per_s, double margin = 10.0);

}  // namespace cavitylink
