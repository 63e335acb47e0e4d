#include "cavitylink/fock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cavitylink {

namespace {

void canonicalize(SparseOp& mat) {
  mat.prune([](int, int, const complexd& v) { return v != complexd(0); });
  mat.makeCompressed();
}

void require_same_space(const Operator& a, const Operator& b) {
  if (!(a.space == b.space))
    throw std::invalid_argument("operator spaces differ");
}

void require_mode(const FockSpace& space, int mode) {
  if (mode < 0 || mode >= space.n_modes)
    throw std::invalid_argument("mode index " + std::to_string(mode) +
                                " out of range for " +
                                std::to_string(space.n_modes) + " mode(s)");
}

}  // namespace

int FockSpace::dim() const {
  int d = levels();
  return n_modes == 2 ? d * d : d;
}

int FockSpace::index(int n0) const {
  if (n_modes != 1) throw std::invalid_argument("one-mode index on a two-mode space");
  if (n0 < 0 || n0 > cutoff) throw std::invalid_argument("occupation out of range");
  return n0;
}

int FockSpace::index(int n0, int n1) const {
  if (n_modes != 2) throw std::invalid_argument("two-mode index on a one-mode space");
  if (n0 < 0 || n0 > cutoff || n1 < 0 || n1 > cutoff)
    throw std::invalid_argument("occupation out of range");
  return n0 * levels() + n1;
}

int FockSpace::occupation(int index, int mode) const {
  require_mode(*this, mode);
  if (index < 0 || index >= dim()) throw std::invalid_argument("basis index out of range");
  if (n_modes == 1) return index;
  return mode == 0 ? index / levels() : index % levels();
}

FockSpace make_space(int n_modes, int cutoff) {
  if (n_modes < 1 || n_modes > 2)
    throw std::invalid_argument("n_modes must be 1 or 2");
  if (cutoff < 1) throw std::invalid_argument("cutoff must be at least 1");
  return FockSpace{n_modes, cutoff};
}

Operator identity(const FockSpace& space) {
  SparseOp mat(space.dim(), space.dim());
  mat.setIdentity();
  canonicalize(mat);
  return {space, std::move(mat)};
}

Operator zero_operator(const FockSpace& space) {
  SparseOp mat(space.dim(), space.dim());
  mat.makeCompressed();
  return {space, std::move(mat)};
}

Operator annihilation(const FockSpace& space, int mode) {
  require_mode(space, mode);
  std::vector<Eigen::Triplet<complexd>> entries;
  const int L = space.levels();
  if (space.n_modes == 1) {
    entries.reserve(space.cutoff);
    for (int n = 1; n <= space.cutoff; ++n)
      entries.emplace_back(n - 1, n, std::sqrt(double(n)));
  } else {
    entries.reserve(space.cutoff * L);
    for (int n0 = 0; n0 < L; ++n0)
      for (int n1 = 0; n1 < L; ++n1) {
        int n = mode == 0 ? n0 : n1;
        if (n == 0) continue;
        int row = mode == 0 ? space.index(n0 - 1, n1) : space.index(n0, n1 - 1);
        entries.emplace_back(row, space.index(n0, n1), std::sqrt(double(n)));
      }
  }
  SparseOp mat(space.dim(), space.dim());
  mat.setFromTriplets(entries.begin(), entries.end());
  canonicalize(mat);
  return {space, std::move(mat)};
}

Operator creation(const FockSpace& space, int mode) {
  return adjoint(annihilation(space, mode));
}

Operator number_operator(const FockSpace& space, int mode) {
  require_mode(space, mode);
  std::vector<Eigen::Triplet<complexd>> entries;
  for (int i = 0; i < space.dim(); ++i) {
    int n = space.occupation(i, mode);
    if (n > 0) entries.emplace_back(i, i, double(n));
  }
  SparseOp mat(space.dim(), space.dim());
  mat.setFromTriplets(entries.begin(), entries.end());
  canonicalize(mat);
  return {space, std::move(mat)};
}

Operator mode_combination(const FockSpace& space, const std::vector<complexd>& coeffs) {
  if (int(coeffs.size()) != space.n_modes)
    throw std::invalid_argument("coefficient count must match the mode count");
  Operator out = scale(coeffs[0], annihilation(space, 0));
  for (int m = 1; m < space.n_modes; ++m)
    out = add(out, scale(coeffs[m], annihilation(space, m)));
  return out;
}

Operator compose(const Operator& a, const Operator& b) {
  require_same_space(a, b);
  SparseOp mat = a.mat * b.mat;
  canonicalize(mat);
  return {a.space, std::move(mat)};
}

Operator add(const Operator& a, const Operator& b) {
  require_same_space(a, b);
  SparseOp mat = a.mat + b.mat;
  canonicalize(mat);
  return {a.space, std::move(mat)};
}

Operator subtract(const Operator& a, const Operator& b) {
  require_same_space(a, b);
  SparseOp mat = a.mat - b.mat;
  canonicalize(mat);
  return {a.space, std::move(mat)};
}

Operator scale(complexd factor, const Operator& a) {
  SparseOp mat = factor * a.mat;
  canonicalize(mat);
  return {a.space, std::move(mat)};
}

Operator adjoint(const Operator& a) {
  SparseOp mat = SparseOp(a.mat.adjoint());
  canonicalize(mat);
  return {a.space, std::move(mat)};
}

Operator commutator(const Operator& a, const Operator& b) {
  return subtract(compose(a, b), compose(b, a));
}

QuantumState vacuum_state(const FockSpace& space) {
  QuantumState state{space, true, VectorC::Zero(space.dim()), {}};
  state.psi(0) = 1.0;
  return state;
}

QuantumState fock_state(const FockSpace& space, const std::vector<int>& occupations) {
  if (int(occupations.size()) != space.n_modes)
    throw std::invalid_argument("occupation count must match the mode count");
  int idx = space.n_modes == 1 ? space.index(occupations[0])
                               : space.index(occupations[0], occupations[1]);
  QuantumState state{space, true, VectorC::Zero(space.dim()), {}};
  state.psi(idx) = 1.0;
  return state;
}

QuantumState coherent_state(const FockSpace& space, const std::vector<complexd>& alphas) {
  if (int(alphas.size()) != space.n_modes)
    throw std::invalid_argument("amplitude count must match the mode count");
  const int L = space.levels();
  auto mode_amplitudes = [L](complexd alpha) {
    VectorC amp(L);
    amp(0) = 1.0;
    for (int n = 1; n < L; ++n) amp(n) = amp(n - 1) * alpha / std::sqrt(double(n));
    return amp;
  };
  VectorC psi;
  if (space.n_modes == 1) {
    psi = mode_amplitudes(alphas[0]);
  } else {
    VectorC a0 = mode_amplitudes(alphas[0]);
    VectorC a1 = mode_amplitudes(alphas[1]);
    psi.resize(space.dim());
    for (int n0 = 0; n0 < L; ++n0)
      for (int n1 = 0; n1 < L; ++n1) psi(space.index(n0, n1)) = a0(n0) * a1(n1);
  }
  return pure_state(space, std::move(psi));
}

QuantumState pure_state(const FockSpace& space, VectorC psi) {
  if (psi.size() != space.dim())
    throw std::invalid_argument("state vector dimension mismatch");
  double norm = psi.norm();
  if (!(norm > 0) || !std::isfinite(norm))
    throw std::invalid_argument("state vector is zero or non-finite");
  psi /= norm;
  return {space, true, std::move(psi), {}};
}

QuantumState mixed_state(const FockSpace& space, MatrixC rho) {
  if (rho.rows() != space.dim() || rho.cols() != space.dim())
    throw std::invalid_argument("density matrix dimension mismatch");
  double tr = rho.trace().real();
  if (!(tr > 0) || !std::isfinite(tr))
    throw std::invalid_argument("density matrix trace is not positive");
  rho /= tr;
  return {space, false, {}, std::move(rho)};
}

QuantumState to_density(const QuantumState& state) {
  if (!state.pure) return state;
  MatrixC rho = state.psi * state.psi.adjoint();
  return {state.space, false, {}, std::move(rho)};
}

complexd expectation(const Operator& op, const QuantumState& state) {
  if (!(op.space == state.space))
    throw std::invalid_argument("operator and state spaces differ");
  if (state.pure) return state.psi.dot(op.mat * state.psi);
  return (op.mat * state.rho).eval().trace();
}

VectorC apply_to(const Operator& op, const VectorC& psi) {
  if (psi.size() != op.space.dim())
    throw std::invalid_argument("state vector dimension mismatch");
  return op.mat * psi;
}

StateDiagnostics state_diagnostics(const QuantumState& state) {
  StateDiagnostics diag{};
  if (state.pure) {
    diag.norm_or_trace = state.psi.norm();
    diag.hermiticity_defect = 0.0;
  } else {
    diag.norm_or_trace = state.rho.trace().real();
    diag.hermiticity_defect =
        (state.rho - state.rho.adjoint()).cwiseAbs().maxCoeff();
  }
  diag.normalized = std::abs(diag.norm_or_trace - 1.0) < 1e-8;
  return diag;
}

double boundary_population(const QuantumState& state) {
  double mass = 0.0;
  for (int i = 0; i < state.dim(); ++i) {
    bool at_edge = false;
    for (int m = 0; m < state.space.n_modes; ++m)
      at_edge = at_edge || state.space.occupation(i, m) == state.space.cutoff;
    if (!at_edge) continue;
    mass += state.pure ? std::norm(state.psi(i)) : state.rho(i, i).real();
  }
  return mass;
}

int recommended_cutoff(double alpha_max, double tail) {
  double lambda = alpha_max * alpha_max;
  double term = std::exp(-lambda);
  double cdf = term;
  int n = 0;
  while (1.0 - cdf >= tail && n < 4096) {
    ++n;
    term *= lambda / n;
    cdf += term;
  }
  return std::max(n, 1);
}

}  // namespace cavitylink
