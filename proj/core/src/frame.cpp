#include "cavitylink/frame.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cavitylink {

namespace {

constexpr double kSpeedOfLight = 299792458.0;  // m/s

double wrap_phase(double phi) {
  while (phi > M_PI) phi -= 2 * M_PI;
  while (phi <= -M_PI) phi += 2 * M_PI;
  return phi;
}

void validate(const SystemParams& p) {
  if (p.kappa1 < 0 || p.kappa2 < 0 || p.kappa_m < 0)
    throw std::invalid_argument("decay rates must be non-negative");
  if (std::norm(p.xi1) + std::norm(p.xi2) <= 0)
    throw std::invalid_argument("fiber couplings must not both vanish");
}

}  // namespace

CommonModeFrame make_frame(const SystemParams& p) {
  validate(p);
  CommonModeFrame f;
  double xi_sq = std::norm(p.xi1) + std::norm(p.xi2);
  f.xi = std::sqrt(xi_sq);
  f.phi = wrap_phase(std::arg(p.xi2) - std::arg(p.xi1));
  f.omega_a = (p.omega1 * p.xi2 - p.omega2 * p.xi1) / f.xi;
  f.omega_b = (p.omega1 * std::conj(p.xi1) + p.omega2 * std::conj(p.xi2)) / f.xi;
  f.kappa_a = (p.kappa1 * std::norm(p.xi2) + p.kappa2 * std::norm(p.xi1)) / xi_sq;
  f.kappa_b = (p.kappa1 * std::norm(p.xi1) + p.kappa2 * std::norm(p.xi2)) / xi_sq;
  f.delta_kappa = p.kappa1 - p.kappa2;
  if (p.kappa_m > 0) {
    complexd cross = p.xi1 * p.xi2 * f.delta_kappa / (xi_sq * p.kappa_m);
    f.omega_eff = f.omega_a - cross * f.omega_b;
    f.kappa_eff = f.kappa_a - std::norm(p.xi1 * p.xi2) * f.delta_kappa *
                                  f.delta_kappa / (xi_sq * xi_sq * p.kappa_m);
  }
  return f;
}

RegimeReport validate_regime(const SystemParams& p, double fiber_length_m,
                             double kappa0_per_s, double margin) {
  validate(p);
  if (fiber_length_m < 0)
    throw std::invalid_argument("fiber length must be non-negative");
  if (kappa0_per_s <= 0)
    throw std::invalid_argument("reference rate must be positive");

  RegimeReport r;
  r.margin = margin;

  double fastest_system_rate = std::max(
      {p.kappa1, p.kappa2, std::abs(p.omega1), std::abs(p.omega2)});
  r.fiber_dominates.ratio =
      fastest_system_rate > 0
          ? p.kappa_m / fastest_system_rate
          : std::numeric_limits<double>::infinity();

  double kappa_m_abs = p.kappa_m * kappa0_per_s;
  double round_trip_s = fiber_length_m / kSpeedOfLight;
  r.round_trip.ratio = round_trip_s > 0 && kappa_m_abs > 0
                           ? (1.0 / kappa_m_abs) / round_trip_s
                           : std::numeric_limits<double>::infinity();

  double max_kappa = std::max(p.kappa1, p.kappa2);
  r.timescales.ratio = max_kappa > 0
                           ? p.kappa_m / max_kappa
                           : std::numeric_limits<double>::infinity();

  for (RegimeCheck* c : {&r.fiber_dominates, &r.round_trip, &r.timescales})
    c->pass = c->ratio >= margin;
  r.pass = r.fiber_dominates.pass && r.round_trip.pass && r.timescales.pass;
  return r;
}

}  // namespace cavitylink
