#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "cavitylink/master.hpp"

namespace cavitylink {

namespace {

// Solves F X + X F^dag = Y for every right-hand side reusing one complex
// Schur factorization F = Q T Q^dag: columns of the rotated unknown follow
// from shifted triangular systems, highest column first.
class LyapunovSolver {
 public:
  explicit LyapunovSolver(const MatrixC& f) : d_(int(f.rows())) {
    Eigen::ComplexSchur<MatrixC> schur(f);
    if (schur.info() != Eigen::Success)
      throw std::runtime_error("Schur factorization failed");
    q_ = schur.matrixU();
    t_ = schur.matrixT();
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j)
        if (std::abs(t_(i, i) + std::conj(t_(j, j))) < 1e-14)
          throw std::runtime_error("Lyapunov operator is singular (undamped mode)");
  }

  MatrixC solve(const MatrixC& y) const {
    MatrixC yt = q_.adjoint() * y * q_;
    MatrixC x = MatrixC::Zero(d_, d_);
    VectorC col(d_), rhs(d_);
    for (int j = d_ - 1; j >= 0; --j) {
      rhs = yt.col(j);
      int tail = d_ - 1 - j;
      if (tail > 0)
        rhs.noalias() -=
            x.rightCols(tail) * t_.row(j).tail(tail).conjugate().transpose();
      const complexd shift = std::conj(t_(j, j));
      for (int i = d_ - 1; i >= 0; --i) {
        complexd s = rhs(i);
        int t2 = d_ - 1 - i;
        if (t2 > 0) s -= (t_.row(i).tail(t2) * col.tail(t2)).value();
        col(i) = s / (t_(i, i) + shift);
      }
      x.col(j) = col;
    }
    return q_ * x * q_.adjoint();
  }

 private:
  int d_;
  MatrixC q_, t_;
};

// Full-memory GMRES with modified Gram-Schmidt and complex Givens rotations.
// Returns the iteration count; `x` holds the best iterate on exit.
template <typename Op>
int gmres(const Op& op, const VectorC& b, VectorC& x, double rel_tol, int maxit) {
  const int n = int(b.size());
  double beta = b.norm();
  x = VectorC::Zero(n);
  if (beta == 0) return 0;

  std::vector<VectorC> v;
  v.reserve(maxit + 1);
  v.push_back(b / beta);
  MatrixC h = MatrixC::Zero(maxit + 1, maxit);
  VectorC g = VectorC::Zero(maxit + 1);
  g(0) = beta;
  std::vector<complexd> cs(maxit), sn(maxit);

  int j = 0;
  for (; j < maxit; ++j) {
    VectorC w = op(v[j]);
    for (int i = 0; i <= j; ++i) {
      h(i, j) = v[i].dot(w);
      w -= h(i, j) * v[i];
    }
    double wnorm = w.norm();
    h(j + 1, j) = wnorm;

    for (int i = 0; i < j; ++i) {
      complexd hi = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
      h(i + 1, j) = -std::conj(sn[i]) * h(i, j) + std::conj(cs[i]) * h(i + 1, j);
      h(i, j) = hi;
    }
    double denom = std::sqrt(std::norm(h(j, j)) + std::norm(h(j + 1, j)));
    if (denom == 0) {
      cs[j] = 1;
      sn[j] = 0;
    } else {
      cs[j] = std::conj(h(j, j)) / denom;
      sn[j] = std::conj(h(j + 1, j)) / denom;
    }
    h(j, j) = cs[j] * h(j, j) + sn[j] * h(j + 1, j);
    h(j + 1, j) = 0;
    g(j + 1) = -std::conj(sn[j]) * g(j);
    g(j) = cs[j] * g(j);

    bool converged = std::abs(g(j + 1)) <= rel_tol * beta;
    bool exhausted = wnorm < 1e-300;  // Krylov space closed up
    if (converged || exhausted || j + 1 == maxit) {
      ++j;
      break;
    }
    v.push_back(w / wnorm);
  }

  // Back-substitute the triangular least-squares system.
  VectorC y = VectorC::Zero(j);
  for (int i = j - 1; i >= 0; --i) {
    complexd s = g(i);
    for (int k = i + 1; k < j; ++k) s -= h(i, k) * y(k);
    y(i) = s / h(i, i);
  }
  for (int i = 0; i < j; ++i) x += y(i) * v[i];
  return j;
}

// Residual gauged against the model's rate scale: a stiff generator (large
// kappa_m) has matrix entries in the thousands, and an absolute max-abs test
// would then sit below what double precision can deliver.
double residual_norm(const SparseOp& liouvillian, const MatrixC& rho,
                     double scale) {
  Eigen::Map<const VectorC> v(rho.data(), rho.size());
  return (liouvillian * v).cwiseAbs().maxCoeff() / scale;
}

QuantumState finalize(const FockSpace& space, MatrixC rho) {
  rho = 0.5 * (rho + rho.adjoint()).eval();
  complexd tr = rho.trace();
  if (std::abs(tr) < 1e-300)
    throw std::runtime_error("steady-state candidate has zero trace");
  rho /= tr;
  return QuantumState{space, false, {}, std::move(rho)};
}

SteadyStateResult schur_gmres_route(const OpenSystemModel& model,
                                    const SparseOp& liouvillian, double tol,
                                    double scale) {
  const int d = model.space.dim();
  const int n = d * d;
  MatrixC f = complexd(0, -1) * MatrixC(model.h_cond.mat);
  LyapunovSolver lyap(f);

  MatrixC w = MatrixC::Zero(d, d);
  w(0, 0) = 1.0;  // trace-one anchor outside the Liouvillian range
  MatrixC w_pre = lyap.solve(w);
  Eigen::Map<const VectorC> rhs(w_pre.data(), n);

  auto op = [&](const VectorC& vec) -> VectorC {
    VectorC lv = liouvillian * vec;
    MatrixC pre = lyap.solve(Eigen::Map<const MatrixC>(lv.data(), d, d));
    complexd trace = 0;
    for (int i = 0; i < d; ++i) trace += vec(i * (d + 1));
    pre += trace * w_pre;
    return Eigen::Map<const VectorC>(pre.data(), n);
  };

  int maxit = std::min(120, n);
  VectorC x;
  int iters = gmres(op, VectorC(rhs), x, 1e-13, maxit);

  SteadyStateResult result;
  result.rho = finalize(model.space, Eigen::Map<const MatrixC>(x.data(), d, d));
  result.residual = residual_norm(liouvillian, result.rho.rho, scale);
  result.iterations = iters;
  result.method = "schur-gmres";
  if (result.residual > tol)
    throw std::runtime_error("Krylov route stalled above the residual tolerance");
  return result;
}

SteadyStateResult sparse_lu_route(const OpenSystemModel& model,
                                  const SparseOp& liouvillian, double tol,
                                  double scale) {
  const int d = model.space.dim();
  const int n = d * d;
  if (n > 40000)
    throw std::runtime_error("problem too large for direct factorization");

  // Rank-one closure of the trace: A = L + vec(W) tr(.), same fixed point.
  std::vector<Eigen::Triplet<complexd>> entries;
  entries.reserve(liouvillian.nonZeros() + d);
  for (int col = 0; col < liouvillian.outerSize(); ++col)
    for (SparseOp::InnerIterator it(liouvillian, col); it; ++it)
      entries.emplace_back(int(it.row()), col, it.value());
  for (int i = 0; i < d; ++i) entries.emplace_back(0, i * (d + 1), complexd(1));
  SparseOp a(n, n);
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();

  Eigen::SparseLU<SparseOp> lu(a);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("sparse factorization of the closed system failed");
  VectorC b = VectorC::Zero(n);
  b(0) = 1.0;
  VectorC x = lu.solve(b);

  SteadyStateResult result;
  result.rho = finalize(model.space, Eigen::Map<const MatrixC>(x.data(), d, d));
  result.residual = residual_norm(liouvillian, result.rho.rho, scale);
  result.iterations = 0;
  result.method = "sparse-lu";
  if (result.residual > tol)
    throw std::runtime_error("direct route missed the residual tolerance");
  return result;
}

SteadyStateResult relaxation_route(const OpenSystemModel& model,
                                   const SparseOp& liouvillian, double tol,
                                   double scale, double slowest_rate) {
  MasterOptions opts;
  opts.n_samples = 2;
  opts.store_states = true;
  double horizon = 60.0 / slowest_rate;
  QuantumState rho = vacuum_state(model.space);
  SteadyStateResult result;
  for (int chunk = 0; chunk < 3; ++chunk) {
    EvolutionResult ev = evolve_master(model, rho, horizon, opts);
    rho = ev.states.back();
    result.rho = finalize(model.space, rho.rho);
    result.residual = residual_norm(liouvillian, result.rho.rho, scale);
    result.iterations = int(ev.steps_accepted);
    result.method = "relaxation";
    if (result.residual <= tol) return result;
    horizon *= 2;
  }
  throw std::runtime_error("relaxation route did not settle within the horizon");
}

// Damping matrix of the first-moment dynamics; its singularity means an
// undamped mode survives, so no unique steady state exists.
void require_damped_modes(const OpenSystemModel& model) {
  const SystemParams& p = model.params;
  Eigen::MatrixXcd k;
  switch (model.representation) {
    case Representation::single:
      k = Eigen::MatrixXcd::Constant(1, 1, p.kappa1);
      break;
    case Representation::effective: {
      CommonModeFrame f = make_frame(p);
      k = Eigen::MatrixXcd::Constant(1, 1, *f.kappa_eff);
      break;
    }
    case Representation::local: {
      double xi_sq = std::norm(p.xi1) + std::norm(p.xi2);
      k.resize(2, 2);
      k(0, 0) = p.kappa1 + p.kappa_m * std::norm(p.xi1) / xi_sq;
      k(0, 1) = p.kappa_m * std::conj(p.xi1) * p.xi2 / xi_sq;
      k(1, 0) = p.kappa_m * std::conj(p.xi2) * p.xi1 / xi_sq;
      k(1, 1) = p.kappa2 + p.kappa_m * std::norm(p.xi2) / xi_sq;
      break;
    }
    case Representation::common: {
      CommonModeFrame f = make_frame(p);
      double xi_sq = f.xi * f.xi;
      k.resize(2, 2);
      k(0, 0) = f.kappa_a;
      k(0, 1) = f.delta_kappa * std::conj(p.xi1 * p.xi2) / xi_sq;
      k(1, 0) = f.delta_kappa * p.xi1 * p.xi2 / xi_sq;
      k(1, 1) = f.kappa_b + p.kappa_m;
      break;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k);
  double min_eig = es.eigenvalues().minCoeff();
  double max_eig = es.eigenvalues().maxCoeff();
  if (min_eig <= 1e-12 * std::max(1.0, max_eig))
    throw std::domain_error(
        "an undamped mode leaves the steady state undefined (check kappa_1, "
        "kappa_2, kappa_m)");
}

double slowest_damping(const OpenSystemModel& model) {
  const SystemParams& p = model.params;
  CommonModeFrame f = make_frame(p);
  switch (model.representation) {
    case Representation::single:
      return p.kappa1;
    case Representation::effective:
      return *f.kappa_eff;
    default: {
      double lo = std::min(f.kappa_a, f.kappa_b + p.kappa_m);
      return lo > 0 ? lo : std::max(f.kappa_a, f.kappa_b + p.kappa_m);
    }
  }
}

}  // namespace

SteadyStateResult steady_state(const OpenSystemModel& model,
                               const SteadyStateOptions& opts) {
  bool any_jump = false;
  for (const auto& j : model.jumps) any_jump = any_jump || j.op.mat.nonZeros() > 0;
  if (!any_jump)
    throw std::domain_error(
        "every jump channel has zero rate; nothing relaxes this system");
  require_damped_modes(model);

  SparseOp liouvillian = liouvillian_matrix(model);
  double tol = opts.residual_tol;
  const double scale = std::max(1.0, rate_scale(model));

  if (opts.method == "schur-gmres")
    return schur_gmres_route(model, liouvillian, tol, scale);
  if (opts.method == "sparse-lu")
    return sparse_lu_route(model, liouvillian, tol, scale);
  if (!opts.method.empty())
    throw std::invalid_argument("unknown steady-state method: " + opts.method);

  std::string failures;
  try {
    return schur_gmres_route(model, liouvillian, tol, scale);
  } catch (const std::exception& e) {
    failures += std::string("schur-gmres: ") + e.what();
  }
  try {
    return sparse_lu_route(model, liouvillian, tol, scale);
  } catch (const std::exception& e) {
    failures += std::string("; sparse-lu: ") + e.what();
  }
  try {
    return relaxation_route(model, liouvillian, tol, scale, slowest_damping(model));
  } catch (const std::exception& e) {
    failures += std::string("; relaxation: ") + e.what();
  }
  throw std::runtime_error("no steady-state route converged (" + failures + ")");
}

}  // namespace cavitylink
