#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace cavitylink {

using complexd = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<complexd>;
using VectorC = Eigen::VectorXcd;
using MatrixC = Eigen::MatrixXcd;

/// Truncated bosonic Fock space with a shared per-mode photon-number cutoff.
/// Basis ordering: for two modes, |n0,n1> sits at index n0*(cutoff+1) + n1.
struct FockSpace {
  int n_modes = 1;  // 1 or 2
  int cutoff = 1;   // max photon number per mode, >= 1

  int dim() const;
  int levels() const { return cutoff + 1; }
  int index(int n0) const;
  int index(int n0, int n1) const;
  /// Photon number of `mode` in basis state `index`.
  int occupation(int index, int mode) const;

  friend bool operator==(const FockSpace&, const FockSpace&) = default;
};

/// Throws std::invalid_argument unless 1 <= n_modes <= 2 and cutoff >= 1.
FockSpace make_space(int n_modes, int cutoff);

/// Immutable sparse operator bound to a space. Matrices are always
/// compressed, sorted, and hold no explicit zero entries, so identical
/// construction sequences give bit-identical storage.
struct Operator {
  FockSpace space;
  SparseOp mat;
};

Operator identity(const FockSpace& space);
Operator zero_operator(const FockSpace& space);
/// Annihilation operator for one mode: <n-1|c|n> = sqrt(n), cutoff-truncated.
Operator annihilation(const FockSpace& space, int mode);
Operator creation(const FockSpace& space, int mode);
Operator number_operator(const FockSpace& space, int mode);
/// sum_m coeffs[m] * c_m; coeffs.size() must equal n_modes.
Operator mode_combination(const FockSpace& space, const std::vector<complexd>& coeffs);

Operator compose(const Operator& a, const Operator& b);  // a * b
Operator add(const Operator& a, const Operator& b);
Operator subtract(const Operator& a, const Operator& b);
Operator scale(complexd factor, const Operator& a);
Operator adjoint(const Operator& a);
Operator commutator(const Operator& a, const Operator& b);

/// Pure or mixed state on a space. Factories normalize; solver outputs may
/// carry small deviations, checked by state_diagnostics.
struct QuantumState {
  FockSpace space;
  bool pure = true;
  VectorC psi;  // used when pure
  MatrixC rho;  // used when mixed

  int dim() const { return space.dim(); }
};

QuantumState vacuum_state(const FockSpace& space);
QuantumState fock_state(const FockSpace& space, const std::vector<int>& occupations);
/// Truncated coherent state, renormalized after truncation.
QuantumState coherent_state(const FockSpace& space, const std::vector<complexd>& alphas);
QuantumState pure_state(const FockSpace& space, VectorC psi);
QuantumState mixed_state(const FockSpace& space, MatrixC rho);
/// |psi><psi| for pure input, identity on mixed input.
QuantumState to_density(const QuantumState& state);

/// <A> = <psi|A|psi> or tr(A rho). Spaces must match.
complexd expectation(const Operator& op, const QuantumState& state);
VectorC apply_to(const Operator& op, const VectorC& psi);

struct StateDiagnostics {
  double norm_or_trace;     // ||psi|| or tr(rho)
  double hermiticity_defect;  // max |rho - rho^dag| (0 for pure)
  bool normalized;          // within 1e-8
};
StateDiagnostics state_diagnostics(const QuantumState& state);

/// Total population on basis states with any mode at the cutoff level;
/// the truncation-leakage measure used by the evolution routines.
double boundary_population(const QuantumState& state);

/// Smallest cutoff N such that a coherent state of amplitude alpha_max keeps
/// tail probability P(n > N) below `tail`. At least 1.
int recommended_cutoff(double alpha_max, double tail = 1e-8);

}  // namespace cavitylink
