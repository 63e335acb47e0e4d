#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cavitylink/model.hpp"

namespace cavitylink {

struct JumpRecord {
  double time;
  int channel;  // index into model.jumps
};

struct McwfOptions {
  int n_samples = 101;                // sample grid incl. endpoints
  std::vector<Operator> observables;  // defaults to per-mode photon numbers
  int threads = 0;                    // 0 = library default
  bool keep_jump_records = true;
};

struct TrajectoryEnsemble {
  int n_trajectories = 0;
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<std::string> channel_labels;
  /// mean[k][i], std_error[k][i]: ensemble statistics of observable k at
  /// times[i]; reduction is done in trajectory-index order, so results are
  /// identical for any thread count.
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> std_error;
  std::vector<std::vector<JumpRecord>> jump_records;  // per trajectory
  std::vector<long> jump_counts;                      // per channel, summed
};

/// Largest eigenvalue of the summed jump-rate operator sum_x R_x^dag R_x on
/// the truncated space (power-iteration estimate). A fixed step dt is fine
/// when this times dt stays below ~0.1.
double max_total_jump_rate(const OpenSystemModel& model);

/// Quantum-jump (Monte Carlo wavefunction) unraveling of the master
/// equation: deterministic drift under the conditional Hamiltonian on a
/// fixed step dt, jump decisions per step with one bisection refinement of
/// the jump time. Each trajectory draws from an independent stream derived
/// from (seed, trajectory index). Throws std::invalid_argument for
/// n_trajectories < 1, dt <= 0, non-pure psi0, or a step so coarse that
/// jump probabilities per step could exceed 0.1.
TrajectoryEnsemble mcwf_trajectories(const OpenSystemModel& model, const QuantumState& psi0,
                                     double t_final, double dt, int n_trajectories,
                                     std::uint64_t seed, const McwfOptions& opts = {});

}  // namespace cavitylink
