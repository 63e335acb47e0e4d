#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

namespace cavitylink::detail {

/// Dormand-Prince 5(4) step on an arbitrary state type supporting
/// scaled-addition semantics. State must provide the operations used below
/// (Eigen vectors/matrices qualify). Returns the embedded error estimate in
/// the same norm as err_norm.
template <typename State, typename Rhs, typename ErrNorm>
struct Dopri5 {
  Rhs rhs;          // void(const State&, State&)
  ErrNorm err_norm; // double(const State& delta, const State& reference)

  // Butcher tableau, Dormand & Prince 1980.
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // 4th-order weights (the FSAL row doubles as a7 coefficients).
  static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695,
                          e4 = 393.0 / 640, e5 = -92097.0 / 339200,
                          e6 = 187.0 / 2100, e7 = 1.0 / 40;

  State k1, k2, k3, k4, k5, k6, k7, work, candidate;

  void resize_like(const State& y) {
    k1 = y; k2 = y; k3 = y; k4 = y; k5 = y; k6 = y; k7 = y;
    work = y; candidate = y;
  }

  /// One attempted step from y with size h. On return candidate holds the
  /// 5th-order result; the return value is the error estimate.
  double attempt(const State& y, double h) {
    rhs(y, k1);
    work = y + h * a21 * k1;
    rhs(work, k2);
    work = y + h * (a31 * k1 + a32 * k2);
    rhs(work, k3);
    work = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(work, k4);
    work = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(work, k5);
    work = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(work, k6);
    candidate = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(candidate, k7);
    work = h * ((b1 - e1) * k1 + (b3 - e3) * k3 + (b4 - e4) * k4 +
                (b5 - e5) * k5 + (b6 - e6) * k6 - e7 * k7);
    return err_norm(work, candidate);
  }
};

/// PI-free step-size update: classic 0.9 * (1/err)^(1/5), clamped to [0.2, 5].
inline double next_step_factor(double error_ratio) {
  if (error_ratio <= 0) return 5.0;
  double f = 0.9 * std::pow(1.0 / error_ratio, 0.2);
  return std::clamp(f, 0.2, 5.0);
}

}  // namespace cavitylink::detail
