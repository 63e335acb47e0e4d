#include "cavitylink/rates.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cavitylink {

namespace {

void require_damped_drives(const SystemParams& p, const CommonModeFrame& f) {
  if (f.kappa_a <= 0.0 && std::abs(f.omega_a) > 0.0)
    throw std::domain_error(
        "combination a is driven but undamped (kappa_a = 0): no steady state");
  if (f.kappa_b + p.kappa_m <= 0.0 && std::abs(f.omega_b) > 0.0)
    throw std::domain_error(
        "combination b is driven but undamped (kappa_b + kappa_m = 0): no "
        "steady state");
}

struct RateSystem {
  Eigen::Matrix<double, 7, 7> a = Eigen::Matrix<double, 7, 7>::Zero();
  Eigen::Matrix<double, 7, 1> b = Eigen::Matrix<double, 7, 1>::Zero();
};

// Variables ordered (n_a, n_b, k_a, k_b, m, l_a, l_b); dx/dt = a x + b.
// Linear and closed: no truncation enters anywhere.
RateSystem assemble(const SystemParams& p, const CommonModeFrame& f) {
  const double xi2 = f.xi * f.xi;
  const double dk = f.delta_kappa;
  const double oa = std::abs(f.omega_a);
  const double ob = std::abs(f.omega_b);
  const double kb_tot = f.kappa_b + p.kappa_m;
  const double cross = std::norm(p.xi1 * p.xi2) * dk / (xi2 * xi2);
  const double drive =
      2.0 * std::real(p.xi1 * p.xi2 * f.omega_b * std::conj(f.omega_a));

  RateSystem s;
  s.a(0, 0) = -f.kappa_a;
  s.a(0, 2) = oa / 2;
  s.a(0, 4) = -dk / 2;
  s.a(1, 1) = -kb_tot;
  s.a(1, 3) = ob / 2;
  s.a(1, 4) = -dk / 2;
  s.a(2, 2) = -f.kappa_a / 2;
  s.a(2, 6) = -dk / 2;
  s.b(2) = oa;
  s.a(3, 3) = -kb_tot / 2;
  s.a(3, 5) = -dk / 2;
  s.b(3) = ob;
  s.a(4, 0) = s.a(4, 1) = -cross;
  s.a(4, 4) = -(p.kappa1 + p.kappa2 + p.kappa_m) / 2;
  s.a(4, 5) = ob / 2;
  s.a(4, 6) = oa / 2;
  s.a(5, 3) = -cross / 2;
  s.a(5, 5) = -f.kappa_a / 2;
  s.b(5) = drive / (2 * xi2 * ob);
  s.a(6, 2) = -cross / 2;
  s.a(6, 6) = -kb_tot / 2;
  s.b(6) = drive / (2 * xi2 * oa);
  return s;
}

void fill_ratio(double n_a, double n_b, double& ratio, bool& infinite) {
  if (n_a <= 0.0 || n_a < 1e-12 * n_b) {
    if (n_b > 0.0) {
      infinite = true;
      ratio = std::numeric_limits<double>::infinity();
    } else {
      ratio = 0.0;
    }
  } else {
    ratio = n_b / n_a;
  }
}

}  // namespace

RateState rate_rhs(const RateState& state, const SystemParams& p) {
  CommonModeFrame f = make_frame(p);
  if (std::abs(f.omega_a) == 0.0 || std::abs(f.omega_b) == 0.0)
    throw std::domain_error(
        "a drive normalizer vanishes, so the k/l quadratures are undefined; "
        "use the moment formulation");
  RateSystem s = assemble(p, f);
  Eigen::Matrix<double, 7, 1> x;
  x << state.n_a, state.n_b, state.k_a, state.k_b, state.m, state.l_a, state.l_b;
  Eigen::Matrix<double, 7, 1> d = s.a * x + s.b;
  return {d(0), d(1), d(2), d(3), d(4), d(5), d(6)};
}

MomentState moment_rhs(const MomentState& state, const SystemParams& p) {
  CommonModeFrame f = make_frame(p);
  const double xi2 = f.xi * f.xi;
  const complexd g_ab =
      f.delta_kappa * std::conj(p.xi1) * std::conj(p.xi2) / xi2;
  const complexd g_ba = f.delta_kappa * p.xi1 * p.xi2 / xi2;
  const double kb_tot = f.kappa_b + p.kappa_m;
  const complexd i1(0.0, 1.0);

  MomentState d;
  d.c_a = -0.5 * i1 * std::conj(f.omega_a) -
          0.5 * (f.kappa_a * state.c_a + g_ab * state.c_b);
  d.c_b = -0.5 * i1 * std::conj(f.omega_b) -
          0.5 * (kb_tot * state.c_b + g_ba * state.c_a);
  d.n_a = -std::imag(f.omega_a * state.c_a) - f.kappa_a * state.n_a -
          std::real(g_ba * state.coherence);
  d.n_b = -std::imag(f.omega_b * state.c_b) - kb_tot * state.n_b -
          std::real(g_ba * state.coherence);
  d.coherence =
      0.5 * i1 * (f.omega_b * state.c_a - std::conj(f.omega_a) * std::conj(state.c_b)) -
      0.5 * (g_ab * (state.n_a + state.n_b) + (f.kappa_a + kb_tot) * state.coherence);
  return d;
}

MomentState moment_steady_state(const SystemParams& p) {
  CommonModeFrame f = make_frame(p);
  require_damped_drives(p, f);
  MomentState out;
  if (std::abs(f.omega_a) == 0.0 && std::abs(f.omega_b) == 0.0)
    return out;  // undriven: everything relaxes to (or stays at) zero

  const double xi2 = f.xi * f.xi;
  const complexd g_ab =
      f.delta_kappa * std::conj(p.xi1) * std::conj(p.xi2) / xi2;
  const complexd g_ba = f.delta_kappa * p.xi1 * p.xi2 / xi2;
  const double kb_tot = f.kappa_b + p.kappa_m;
  const complexd i1(0.0, 1.0);

  Eigen::Matrix2cd k;
  k << f.kappa_a, g_ab, g_ba, kb_tot;
  Eigen::Vector2cd rhs;
  rhs << -i1 * std::conj(f.omega_a), -i1 * std::conj(f.omega_b);
  Eigen::FullPivLU<Eigen::Matrix2cd> lu(k);
  if (!lu.isInvertible())
    throw std::domain_error(
        "first-moment damping matrix is singular: no unique steady state");
  Eigen::Vector2cd alpha = lu.solve(rhs);
  out.c_a = alpha(0);
  out.c_b = alpha(1);

  // Second moments close on (n_a, n_b, Re coh, Im coh).
  const double pa = -std::imag(f.omega_a * out.c_a);
  const double qb = -std::imag(f.omega_b * out.c_b);
  const complexd j =
      i1 * (f.omega_b * out.c_a - std::conj(f.omega_a) * std::conj(out.c_b));
  const double ktot = f.kappa_a + kb_tot;
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  Eigen::Vector4d b;
  a(0, 0) = f.kappa_a;
  a(0, 2) = g_ba.real();
  a(0, 3) = -g_ba.imag();
  b(0) = pa;
  a(1, 1) = kb_tot;
  a(1, 2) = g_ba.real();
  a(1, 3) = -g_ba.imag();
  b(1) = qb;
  a(2, 0) = a(2, 1) = g_ab.real();
  a(2, 2) = ktot;
  b(2) = j.real();
  a(3, 0) = a(3, 1) = g_ab.imag();
  a(3, 3) = ktot;
  b(3) = j.imag();
  Eigen::FullPivLU<Eigen::Matrix4d> lu2(a);
  if (!lu2.isInvertible())
    throw std::domain_error(
        "second-moment system is singular: no unique steady state");
  Eigen::Vector4d x = lu2.solve(b);
  out.n_a = x(0);
  out.n_b = x(1);
  out.coherence = complexd(x(2), x(3));
  return out;
}

RateSolution rate_steady_state(const SystemParams& p) {
  CommonModeFrame f = make_frame(p);
  require_damped_drives(p, f);
  RateSolution out;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  if (std::abs(f.omega_a) > 0.0 && std::abs(f.omega_b) > 0.0) {
    RateSystem s = assemble(p, f);
    Eigen::FullPivLU<Eigen::Matrix<double, 7, 7>> lu(s.a);
    if (!lu.isInvertible())
      throw std::domain_error(
          "rate system is singular: an undamped combination persists");
    Eigen::Matrix<double, 7, 1> x = lu.solve((-s.b).eval());
    out.state = {x(0), x(1), x(2), x(3), x(4), x(5), x(6)};
    out.quadratures_defined = true;
  } else {
    MomentState ms = moment_steady_state(p);
    out.state.n_a = ms.n_a;
    out.state.n_b = ms.n_b;
    out.state.m = 2.0 * std::real(p.xi1 * p.xi2 * ms.coherence) / (f.xi * f.xi);
    out.state.k_a = out.state.k_b = out.state.l_a = out.state.l_b = nan;
  }
  out.n_a = out.state.n_a;
  out.n_b = out.state.n_b;
  fill_ratio(out.n_a, out.n_b, out.ratio, out.ratio_infinite);
  return out;
}

SymmetricSteady symmetric_steady(double omega, double kappa, double kappa_m,
                                 double phi) {
  if (!(kappa > 0.0))
    throw std::domain_error("cavity decay rate must be positive");
  if (kappa_m < 0.0)
    throw std::domain_error("fiber decay rate must be non-negative");
  SymmetricSteady s;
  const double w2 = omega * omega;
  s.n_a = (1.0 - std::cos(phi)) * w2 / (kappa * kappa);
  s.n_b = (1.0 + std::cos(phi)) * w2 / ((kappa + kappa_m) * (kappa + kappa_m));
  fill_ratio(s.n_a, s.n_b, s.ratio, s.ratio_infinite);
  return s;
}

}  // namespace cavitylink
