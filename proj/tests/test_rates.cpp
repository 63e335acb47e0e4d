#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "cavitylink/master.hpp"
#include "cavitylink/rates.hpp"

using namespace cavitylink;

namespace {

std::mt19937 rng(60601);

complexd random_complex(double lo = 0.1, double hi = 1.0) {
  std::uniform_real_distribution<double> mag(lo, hi);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  return std::polar(mag(rng), ang(rng));
}

SystemParams random_params() {
  std::uniform_real_distribution<double> mag(0.3, 1.2);
  SystemParams p;
  p.kappa1 = mag(rng);
  p.kappa2 = mag(rng);
  p.kappa_m = 4.0 * mag(rng);
  p.omega1 = random_complex();
  p.omega2 = random_complex();
  p.xi1 = random_complex();
  p.xi2 = random_complex();
  return p;
}

// The asymmetric configuration used for full-model cross checks.
SystemParams cross_check_params() {
  SystemParams p;
  p.kappa1 = 1.0;
  p.kappa2 = 0.45;
  p.kappa_m = 6.0;
  p.omega1 = complexd(0.5, 0.2);
  p.omega2 = complexd(0.4, -0.33);
  p.xi1 = complexd(0.9, 0.55);
  p.xi2 = complexd(-0.6, 1.1);
  return p;
}

// Extract the seven rate variables from a full quantum state expressed in
// the per-cavity basis.
RateState extract_vars(const QuantumState& state, const SystemParams& p) {
  CommonModeFrame f = make_frame(p);
  const double xi2 = f.xi * f.xi;
  const FockSpace& s = state.space;
  Operator ca = mode_combination(
      s, {std::conj(p.xi2) / f.xi, -std::conj(p.xi1) / f.xi});
  Operator cb = mode_combination(s, {p.xi1 / f.xi, p.xi2 / f.xi});
  complexd ea = expectation(ca, state);
  complexd eb = expectation(cb, state);
  complexd coh = expectation(compose(adjoint(cb), ca), state);
  complexd xx = p.xi1 * p.xi2;

  RateState v;
  v.n_a = expectation(compose(adjoint(ca), ca), state).real();
  v.n_b = expectation(compose(adjoint(cb), cb), state).real();
  v.k_a = -2.0 * std::imag(f.omega_a * ea) / std::abs(f.omega_a);
  v.k_b = -2.0 * std::imag(f.omega_b * eb) / std::abs(f.omega_b);
  v.m = 2.0 * std::real(xx * coh) / xi2;
  v.l_a = -2.0 * std::imag(xx * f.omega_b * ea) / (std::abs(f.omega_b) * xi2);
  v.l_b = -2.0 * std::imag(std::conj(xx) * f.omega_a * eb) /
          (std::abs(f.omega_a) * xi2);
  return v;
}

std::array<double, 7> to_array(const RateState& s) {
  return {s.n_a, s.n_b, s.k_a, s.k_b, s.m, s.l_a, s.l_b};
}

RateState from_array(const std::array<double, 7>& x) {
  return {x[0], x[1], x[2], x[3], x[4], x[5], x[6]};
}

// Plain RK4 over the rate system, used to compare its transient against the
// full quantum evolution.
RateState integrate_rates(RateState state, const SystemParams& p, double t_final,
                          double dt) {
  int n = static_cast<int>(std::ceil(t_final / dt));
  double h = t_final / n;
  for (int i = 0; i < n; ++i) {
    auto y = to_array(state);
    auto k1 = to_array(rate_rhs(state, p));
    std::array<double, 7> t2;
    for (int j = 0; j < 7; ++j) t2[j] = y[j] + 0.5 * h * k1[j];
    auto k2 = to_array(rate_rhs(from_array(t2), p));
    for (int j = 0; j < 7; ++j) t2[j] = y[j] + 0.5 * h * k2[j];
    auto k3 = to_array(rate_rhs(from_array(t2), p));
    for (int j = 0; j < 7; ++j) t2[j] = y[j] + h * k3[j];
    auto k4 = to_array(rate_rhs(from_array(t2), p));
    for (int j = 0; j < 7; ++j)
      y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    state = from_array(y);
  }
  return state;
}

}  // namespace

TEST_CASE("rate-system steady state matches the full quantum model") {
  SystemParams p = cross_check_params();
  RateSolution sol = rate_steady_state(p);
  REQUIRE(sol.quadratures_defined);

  OpenSystemModel m = build_local(p, 8);
  SteadyStateResult full = steady_state(m);
  RateState ref = extract_vars(full.rho, p);

  CHECK(sol.n_a == doctest::Approx(ref.n_a).epsilon(1e-5));
  CHECK(sol.n_b == doctest::Approx(ref.n_b).epsilon(1e-5));
  CHECK(sol.state.k_a == doctest::Approx(ref.k_a).epsilon(1e-4));
  CHECK(sol.state.k_b == doctest::Approx(ref.k_b).epsilon(1e-4));
  CHECK(std::abs(sol.state.m - ref.m) < 1e-5);
  CHECK(std::abs(sol.state.l_a - ref.l_a) < 1e-4);
  CHECK(std::abs(sol.state.l_b - ref.l_b) < 1e-4);
  CHECK(sol.ratio == doctest::Approx(sol.n_b / sol.n_a).epsilon(1e-12));
}

TEST_CASE("rate transient follows the full quantum evolution from vacuum") {
  SystemParams p = cross_check_params();
  OpenSystemModel m = build_local(p, 7);

  MasterOptions opts;
  opts.n_samples = 4;
  opts.store_states = true;
  EvolutionResult full = evolve_master(m, vacuum_state(m.space), 1.5, opts);

  for (std::size_t i = 1; i < full.times.size(); ++i) {
    RateState rate = integrate_rates(RateState{}, p, full.times[i], 1e-3);
    RateState ref = extract_vars(full.states[i], p);
    CHECK(std::abs(rate.n_a - ref.n_a) < 5e-4);
    CHECK(std::abs(rate.n_b - ref.n_b) < 5e-4);
    CHECK(std::abs(rate.k_a - ref.k_a) < 5e-4);
    CHECK(std::abs(rate.k_b - ref.k_b) < 5e-4);
    CHECK(std::abs(rate.m - ref.m) < 5e-4);
    CHECK(std::abs(rate.l_a - ref.l_a) < 5e-4);
    CHECK(std::abs(rate.l_b - ref.l_b) < 5e-4);
  }
}

TEST_CASE("rate and moment routes agree on every random draw") {
  for (int trial = 0; trial < 25; ++trial) {
    SystemParams p = random_params();
    CommonModeFrame f = make_frame(p);
    if (std::abs(f.omega_a) < 1e-3 || std::abs(f.omega_b) < 1e-3) continue;

    RateSolution r = rate_steady_state(p);
    MomentState ms = moment_steady_state(p);
    CHECK(r.n_a == doctest::Approx(ms.n_a).epsilon(1e-10));
    CHECK(r.n_b == doctest::Approx(ms.n_b).epsilon(1e-10));

    // m is the damping-weighted real part of the mode coherence.
    double m_from_moments =
        2.0 * std::real(p.xi1 * p.xi2 * ms.coherence) / (f.xi * f.xi);
    CHECK(r.state.m == doctest::Approx(m_from_moments).epsilon(1e-9));

    // The moment rhs must vanish at its own steady state.
    MomentState dot = moment_rhs(ms, p);
    double scale = p.kappa1 + p.kappa2 + p.kappa_m + 1.0;
    CHECK(std::abs(dot.c_a) < 1e-11 * scale);
    CHECK(std::abs(dot.c_b) < 1e-11 * scale);
    CHECK(std::abs(dot.n_a) < 1e-11 * scale);
    CHECK(std::abs(dot.n_b) < 1e-11 * scale);
    CHECK(std::abs(dot.coherence) < 1e-11 * scale);

    // And the rate rhs at the rate steady state.
    RateState rdot = rate_rhs(r.state, p);
    for (double v : to_array(rdot)) CHECK(std::abs(v) < 1e-10 * scale);
  }
}

TEST_CASE("decoupled symmetric configuration reproduces the closed forms") {
  double omega = 0.8, kappa = 1.1, kappa_m = 6.0;
  for (double phi : {0.3, M_PI / 2, 0.75 * M_PI, 0.9 * M_PI}) {
    SystemParams p;
    p.kappa1 = p.kappa2 = kappa;
    p.kappa_m = kappa_m;
    p.omega1 = omega;
    p.omega2 = omega;
    p.xi1 = 1.0;
    p.xi2 = std::polar(1.0, phi);

    SymmetricSteady closed = symmetric_steady(omega, kappa, kappa_m, phi);
    CHECK(closed.n_a ==
          doctest::Approx((1.0 - std::cos(phi)) * omega * omega / (kappa * kappa))
              .epsilon(1e-14));
    CHECK(closed.n_b == doctest::Approx((1.0 + std::cos(phi)) * omega * omega /
                                        ((kappa + kappa_m) * (kappa + kappa_m)))
                            .epsilon(1e-14));

    RateSolution r = rate_steady_state(p);
    CHECK(r.n_a == doctest::Approx(closed.n_a).epsilon(1e-12));
    CHECK(r.n_b == doctest::Approx(closed.n_b).epsilon(1e-12));
    CHECK(r.ratio == doctest::Approx(closed.ratio).epsilon(1e-12));

    MomentState ms = moment_steady_state(p);
    CHECK(ms.n_a == doctest::Approx(closed.n_a).epsilon(1e-12));
    // Equal decay rates decouple the modes: each relaxes to a coherent
    // amplitude, so n = |<c>|^2.
    CHECK(ms.n_a == doctest::Approx(std::norm(ms.c_a)).epsilon(1e-12));
    CHECK(ms.n_b == doctest::Approx(std::norm(ms.c_b)).epsilon(1e-12));
  }
}

TEST_CASE("symmetric closed form: spot values and edge handling") {
  // Quarter-turn phase, strong fiber: the bright-to-dark ratio lands at 1/81.
  SymmetricSteady s = symmetric_steady(1.0, 1.0, 8.0, M_PI / 2);
  CHECK(s.n_a == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.n_b == doctest::Approx(1.0 / 81.0).epsilon(1e-14));
  CHECK(s.ratio == doctest::Approx(1.0 / 81.0).epsilon(1e-14));
  CHECK(!s.ratio_infinite);

  // Near-opposed drives push the ratio far below the quarter-turn value.
  SymmetricSteady t = symmetric_steady(1.0, 1.0, 8.0, 0.9 * M_PI);
  double expected = (1.0 + std::cos(0.9 * M_PI)) / (1.0 - std::cos(0.9 * M_PI)) / 81.0;
  CHECK(t.ratio == doctest::Approx(expected).epsilon(1e-12));
  CHECK(t.ratio == doctest::Approx(3.097e-4).epsilon(1e-3));

  // Opposed drives empty the damped combination entirely.
  SymmetricSteady u = symmetric_steady(1.0, 1.0, 8.0, M_PI);
  CHECK(u.n_b == 0.0);
  CHECK(u.ratio == 0.0);
  CHECK(!u.ratio_infinite);

  // In-phase drives empty the long-lived combination instead.
  SymmetricSteady v = symmetric_steady(1.0, 1.0, 8.0, 0.0);
  CHECK(v.n_a == 0.0);
  CHECK(v.ratio_infinite);

  // No drive, no photons, and the ratio is zero rather than infinite.
  SymmetricSteady w = symmetric_steady(0.0, 1.0, 8.0, M_PI / 2);
  CHECK(w.n_a == 0.0);
  CHECK(w.n_b == 0.0);
  CHECK(w.ratio == 0.0);
  CHECK(!w.ratio_infinite);

  CHECK_THROWS_AS(symmetric_steady(1.0, 0.0, 8.0, M_PI / 2), std::domain_error);
  CHECK_THROWS_AS(symmetric_steady(1.0, -1.0, 8.0, M_PI / 2), std::domain_error);
}

TEST_CASE("vanishing drive normalizer falls back to the moment route") {
  SystemParams p;
  p.kappa1 = p.kappa2 = 1.0;
  p.kappa_m = 5.0;
  p.xi1 = complexd(0.6, 0.45);
  p.xi2 = complexd(-0.6, 0.25);
  p.omega1 = -std::conj(p.xi2);  // aligned: the damped combination is undriven
  p.omega2 = std::conj(p.xi1);

  CommonModeFrame f = make_frame(p);
  REQUIRE(std::abs(f.omega_b) < 1e-14);

  RateSolution r = rate_steady_state(p);
  CHECK(!r.quadratures_defined);
  CHECK(r.n_b < 1e-20);
  CHECK(r.n_a > 0.1);
  CHECK(r.ratio == 0.0);
  CHECK(!r.ratio_infinite);
  CHECK(std::isnan(r.state.k_a));
  CHECK(std::isnan(r.state.k_b));
  CHECK(std::isnan(r.state.l_a));
  CHECK(std::isnan(r.state.l_b));

  CHECK_THROWS_AS(rate_rhs(RateState{}, p), std::domain_error);

  // The mirrored alignment drives only the damped combination: that takes
  // omega1/omega2 = xi1/xi2, which zeroes the other normalizer.
  SystemParams q = p;
  q.omega1 = q.xi1;
  q.omega2 = q.xi2;
  CommonModeFrame g = make_frame(q);
  REQUIRE(std::abs(g.omega_a) < 1e-14);
  RateSolution rq = rate_steady_state(q);
  CHECK(!rq.quadratures_defined);
  CHECK(rq.n_a < 1e-20);
  CHECK(rq.n_b > 1e-4);
  CHECK(rq.ratio_infinite);
}

TEST_CASE("a drive on an undamped mode is rejected") {
  SystemParams p;
  p.kappa1 = 1.0;
  p.kappa2 = 0.0;
  p.kappa_m = 3.0;
  p.xi1 = 1.0;
  p.xi2 = 0.0;  // only cavity 1 couples, so kappa_a collapses to kappa_2 = 0
  p.omega1 = 0.0;
  p.omega2 = complexd(0.5, 0.0);
  CommonModeFrame f = make_frame(p);
  REQUIRE(f.kappa_a == 0.0);
  REQUIRE(std::abs(f.omega_a) > 0.0);

  CHECK_THROWS_AS(rate_steady_state(p), std::domain_error);
  CHECK_THROWS_AS(moment_steady_state(p), std::domain_error);
}

TEST_CASE("undriven network relaxes to zero occupation") {
  SystemParams p = random_params();
  p.omega1 = 0.0;
  p.omega2 = 0.0;
  RateSolution r = rate_steady_state(p);
  CHECK(r.n_a == 0.0);
  CHECK(r.n_b == 0.0);
  CHECK(r.ratio == 0.0);
  CHECK(!r.ratio_infinite);
  MomentState ms = moment_steady_state(p);
  CHECK(std::abs(ms.c_a) == 0.0);
  CHECK(std::abs(ms.c_b) == 0.0);
}
