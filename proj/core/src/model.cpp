#include "cavitylink/model.hpp"

#include <cmath>
#include <stdexcept>

namespace cavitylink {

namespace {

Operator drive_term(const complexd& omega, const Operator& c) {
  return add(scale(omega / 2.0, c), scale(std::conj(omega) / 2.0, adjoint(c)));
}

Operator number_of(const Operator& c) { return compose(adjoint(c), c); }

const complexd kHalfI(0, 0.5);

}  // namespace

OpenSystemModel build_single_cavity(complexd omega, double kappa, int cutoff) {
  if (kappa < 0) throw std::invalid_argument("decay rate must be non-negative");
  if (kappa == 0 && omega != complexd(0))
    throw std::invalid_argument("a driven cavity needs a positive decay rate");
  FockSpace s = make_space(1, cutoff);
  Operator c = annihilation(s, 0);
  Operator h = subtract(drive_term(omega, c), scale(kHalfI * kappa, number_of(c)));

  OpenSystemModel m;
  m.representation = Representation::single;
  m.space = s;
  m.h_cond = std::move(h);
  m.jumps.push_back({"1", scale(std::sqrt(kappa), c)});
  m.params.kappa1 = kappa;
  m.params.kappa2 = 0.0;
  m.params.kappa_m = 0.0;
  m.params.omega1 = omega;
  m.params.omega2 = 0.0;
  m.params.xi1 = 1.0;
  m.params.xi2 = 0.0;
  return m;
}

OpenSystemModel build_local(const SystemParams& p, int cutoff) {
  CommonModeFrame f = make_frame(p);
  FockSpace s = make_space(2, cutoff);
  Operator c1 = annihilation(s, 0);
  Operator c2 = annihilation(s, 1);
  Operator fiber = mode_combination(s, {p.xi1, p.xi2});

  Operator damp = add(add(scale(p.kappa1, number_of(c1)), scale(p.kappa2, number_of(c2))),
                      scale(p.kappa_m / (f.xi * f.xi), number_of(fiber)));
  Operator h = subtract(add(drive_term(p.omega1, c1), drive_term(p.omega2, c2)),
                        scale(kHalfI, damp));

  OpenSystemModel m;
  m.representation = Representation::local;
  m.space = s;
  m.h_cond = std::move(h);
  m.jumps.push_back({"1", scale(std::sqrt(p.kappa1), c1)});
  m.jumps.push_back({"2", scale(std::sqrt(p.kappa2), c2)});
  m.jumps.push_back({"m", scale(std::sqrt(p.kappa_m) / f.xi, fiber)});
  m.params = p;
  return m;
}

OpenSystemModel build_common(const SystemParams& p, int cutoff) {
  CommonModeFrame f = make_frame(p);
  FockSpace s = make_space(2, cutoff);
  Operator ca = annihilation(s, 0);  // fiber-dark combination
  Operator cb = annihilation(s, 1);  // fiber-coupled combination
  double xi_sq = f.xi * f.xi;

  Operator mix = add(scale(p.xi1 * p.xi2, compose(adjoint(cb), ca)),
                     scale(std::conj(p.xi1 * p.xi2), compose(adjoint(ca), cb)));
  Operator damp = add(add(scale(f.kappa_a, number_of(ca)),
                          scale(f.kappa_b + p.kappa_m, number_of(cb))),
                      scale(f.delta_kappa / xi_sq, mix));
  Operator h = subtract(add(drive_term(f.omega_a, ca), drive_term(f.omega_b, cb)),
                        scale(kHalfI, damp));

  OpenSystemModel m;
  m.representation = Representation::common;
  m.space = s;
  m.h_cond = std::move(h);
  double sk1 = std::sqrt(p.kappa1) / f.xi;
  double sk2 = std::sqrt(p.kappa2) / f.xi;
  m.jumps.push_back({"1", mode_combination(s, {sk1 * p.xi2, sk1 * std::conj(p.xi1)})});
  m.jumps.push_back({"2", mode_combination(s, {-sk2 * p.xi1, sk2 * std::conj(p.xi2)})});
  m.jumps.push_back({"m", scale(std::sqrt(p.kappa_m), cb)});
  m.params = p;
  return m;
}

OpenSystemModel build_effective(const SystemParams& p, int cutoff) {
  CommonModeFrame f = make_frame(p);
  if (!(p.kappa_m > 0))
    throw std::domain_error("fiber elimination requires a positive fiber damping rate");
  FockSpace s = make_space(1, cutoff);
  Operator c = annihilation(s, 0);

  double xi_sq = f.xi * f.xi;
  complexd shift = f.delta_kappa / (xi_sq * p.kappa_m);
  complexd p1 = std::sqrt(p.kappa1) * (p.xi2 / f.xi) * (1.0 - std::norm(p.xi1) * shift);
  complexd p2 = -std::sqrt(p.kappa2) * (p.xi1 / f.xi) * (1.0 + std::norm(p.xi2) * shift);
  complexd pm = -std::sqrt(p.kappa_m) * p.xi1 * p.xi2 * shift;

  // The conditional decay uses the summed channel rates, which differ from
  // kappa_eff only beyond the elimination order; taking kappa_eff itself
  // would leave the generator trace-preserving only to O(1/kappa_m^2) and
  // put a floor under every steady-state residual.
  double kappa_used = std::norm(p1) + std::norm(p2) + std::norm(pm);
  Operator h = subtract(drive_term(*f.omega_eff, c),
                        scale(kHalfI * kappa_used, number_of(c)));

  OpenSystemModel m;
  m.representation = Representation::effective;
  m.space = s;
  m.h_cond = std::move(h);
  m.jumps.push_back({"1", scale(p1, c)});
  m.jumps.push_back({"2", scale(p2, c)});
  m.jumps.push_back({"m", scale(pm, c)});
  m.params = p;
  return m;
}

double rate_scale(const OpenSystemModel& m) {
  const SystemParams& p = m.params;
  switch (m.representation) {
    case Representation::single:
      return p.kappa1 + std::abs(p.omega1);
    case Representation::local:
    case Representation::common:
      return p.kappa1 + p.kappa2 + p.kappa_m + std::abs(p.omega1) +
             std::abs(p.omega2);
    case Representation::effective: {
      CommonModeFrame f = make_frame(p);
      return *f.kappa_eff + std::abs(*f.omega_eff);
    }
  }
  return 0.0;
}

int recommended_cutoff_for(const SystemParams& p) {
  CommonModeFrame f = make_frame(p);
  double xi_sq = f.xi * f.xi;
  // Steady first moments of the linear system: K alpha = -i conj(Omega).
  Eigen::Matrix2cd K;
  K(0, 0) = p.kappa1 + p.kappa_m * std::norm(p.xi1) / xi_sq;
  K(0, 1) = p.kappa_m * std::conj(p.xi1) * p.xi2 / xi_sq;
  K(1, 0) = p.kappa_m * std::conj(p.xi2) * p.xi1 / xi_sq;
  K(1, 1) = p.kappa2 + p.kappa_m * std::norm(p.xi2) / xi_sq;
  Eigen::Vector2cd b(-complexd(0, 1) * std::conj(p.omega1),
                     -complexd(0, 1) * std::conj(p.omega2));
  Eigen::Vector2cd alpha = K.fullPivLu().solve(b);
  double residual = (K * alpha - b).norm();
  double scale = b.norm() + K.norm() * alpha.norm();
  if (!alpha.allFinite() || residual > 1e-9 * std::max(scale, 1e-30))
    throw std::domain_error("no finite steady amplitude: drive acts on an undamped mode");
  return recommended_cutoff(alpha.norm());
}

}  // namespace cavitylink
