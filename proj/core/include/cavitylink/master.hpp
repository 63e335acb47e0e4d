#pragma once

#include <functional>
#include <vector>

#include "cavitylink/model.hpp"

namespace cavitylink {

struct MasterOptions {
  double dt_max = 0.0;       // extra step cap; 0 = rate-scale bound only
  double rel_tol = 1e-9;     // embedded-pair error control
  double abs_tol = 1e-11;
  int n_samples = 101;       // evenly spaced sample times incl. endpoints
  std::vector<Operator> observables;  // sampled when non-empty
  bool store_states = false;          // keep rho at sample times
};

struct EvolutionResult {
  std::vector<double> times;
  /// observable_values[k][i] = Re<obs k> at times[i].
  std::vector<std::vector<double>> observable_values;
  std::vector<QuantumState> states;  // filled when store_states
  long steps_accepted = 0;
  long steps_rejected = 0;
  double max_trace_drift = 0.0;   // max |tr rho - 1| seen
  double max_leakage = 0.0;       // max cutoff-boundary population seen
  bool leakage_warning = false;   // max_leakage > 1e-6
};

/// Integrates the master equation d rho/dt = -i(H rho - rho H^dag)
/// + sum_x R_x rho R_x^dag with an embedded adaptive Runge-Kutta 4(5) pair
/// on the vectorized density matrix. Hermiticity is restored by
/// symmetrization after each accepted step; the trace is monitored, not
/// rescaled. Throws std::invalid_argument for t_final <= 0 or space
/// mismatch, std::runtime_error if the controller underflows the step size.
EvolutionResult evolve_master(const OpenSystemModel& model, const QuantumState& rho0,
                              double t_final, const MasterOptions& opts = {});

struct SteadyStateResult {
  QuantumState rho;        // hermitized, trace 1
  /// Max-abs of the Liouvillian applied to rho, divided by the model's rate
  /// scale when that exceeds one; stiff and slow systems are gauged alike.
  double residual;
  int iterations;          // Krylov iterations (0 for the direct route)
  std::string method;      // "schur-gmres", "sparse-lu", "relaxation"
};

struct SteadyStateOptions {
  double residual_tol = 1e-10;  // bound on the rate-scale-gauged residual
  /// Force one route instead of the automatic choice: "schur-gmres" or
  /// "sparse-lu". Empty = automatic with fallback.
  std::string method;
};

/// Steady state of the model's master equation: the trace-one kernel element
/// of the Liouvillian, solved as a linear system with the trace condition
/// closing the rank deficiency. Throws std::domain_error when every jump
/// channel has zero rate (no relaxation) or the drive acts on an undamped
/// mode; std::runtime_error when no route reaches the residual tolerance.
SteadyStateResult steady_state(const OpenSystemModel& model,
                               const SteadyStateOptions& opts = {});

/// Sparse Liouvillian acting on column-major vec(rho); exposed for tests and
/// benchmarks.
SparseOp liouvillian_matrix(const OpenSystemModel& model);

}  // namespace cavitylink
