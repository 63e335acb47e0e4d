#include "cavitylink/master.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "cavitylink/detail/rk45.hpp"

namespace cavitylink {

namespace {

// tr(A rho) without forming the product, iterating the nonzeros of A.
complexd trace_prod(const SparseOp& a, const MatrixC& rho) {
  complexd sum = 0;
  for (int col = 0; col < a.outerSize(); ++col)
    for (SparseOp::InnerIterator it(a, col); it; ++it)
      sum += it.value() * rho(col, it.row());
  return sum;
}

}  // namespace

EvolutionResult evolve_master(const OpenSystemModel& model, const QuantumState& rho0,
                              double t_final, const MasterOptions& opts) {
  if (!(t_final > 0)) throw std::invalid_argument("t_final must be positive");
  if (!(rho0.space == model.space))
    throw std::invalid_argument("initial state lives on a different space");
  if (opts.n_samples < 2) throw std::invalid_argument("need at least two samples");
  for (const auto& obs : opts.observables)
    if (!(obs.space == model.space))
      throw std::invalid_argument("observable lives on a different space");

  const int d = model.space.dim();
  const SparseOp& h = model.h_cond.mat;
  SparseOp h_dag = adjoint(model.h_cond).mat;
  std::vector<SparseOp> jump, jump_dag;
  for (const auto& j : model.jumps) {
    if (j.op.mat.nonZeros() == 0) continue;
    jump.push_back(j.op.mat);
    jump_dag.push_back(adjoint(j.op).mat);
  }

  auto rhs = [&](const MatrixC& rho, MatrixC& out) {
    out.noalias() = complexd(0, -1) * (h * rho);
    out.noalias() += complexd(0, 1) * (rho * h_dag);
    for (size_t x = 0; x < jump.size(); ++x)
      out.noalias() += jump[x] * (rho * jump_dag[x]);
  };
  auto err_norm = [&](const MatrixC& delta, const MatrixC& ref) {
    double scale = opts.abs_tol + opts.rel_tol * ref.cwiseAbs().maxCoeff();
    return delta.cwiseAbs().maxCoeff() / scale;
  };
  detail::Dopri5<MatrixC, decltype(rhs), decltype(err_norm)> stepper{rhs, err_norm};

  std::vector<int> edge;
  for (int i = 0; i < d; ++i)
    for (int m = 0; m < model.space.n_modes; ++m)
      if (model.space.occupation(i, m) == model.space.cutoff) {
        edge.push_back(i);
        break;
      }

  double scale = rate_scale(model);
  double h_cap = scale > 0 ? 0.05 / scale : t_final;
  if (opts.dt_max > 0) h_cap = std::min(h_cap, opts.dt_max);

  EvolutionResult result;
  result.times.resize(opts.n_samples);
  result.observable_values.assign(opts.observables.size(),
                                  std::vector<double>(opts.n_samples, 0.0));

  MatrixC rho = to_density(rho0).rho;
  stepper.resize_like(rho);

  auto record = [&](int sample) {
    for (size_t k = 0; k < opts.observables.size(); ++k)
      result.observable_values[k][sample] =
          trace_prod(opts.observables[k].mat, rho).real();
    if (opts.store_states)
      result.states.push_back(QuantumState{model.space, false, {}, rho});
  };
  auto monitor = [&]() {
    result.max_trace_drift =
        std::max(result.max_trace_drift, std::abs(rho.trace().real() - 1.0));
    double leak = 0;
    for (int i : edge) leak += rho(i, i).real();
    result.max_leakage = std::max(result.max_leakage, leak);
  };

  record(0);
  monitor();

  double t = 0;
  double step = h_cap;
  for (int sample = 1; sample < opts.n_samples; ++sample) {
    double target = t_final * sample / (opts.n_samples - 1);
    result.times[sample] = target;
    while (t < target) {
      double remaining = target - t;
      if (remaining <= 1e-13 * std::max(1.0, t_final)) break;  // boundary snap
      if (step < 1e-14 * std::max(1.0, t_final))
        throw std::runtime_error("step size underflow in the master integrator");
      double hs = std::min({step, h_cap, remaining});
      double err = stepper.attempt(rho, hs);
      if (err <= 1.0) {
        rho = 0.5 * (stepper.candidate + stepper.candidate.adjoint());
        t += hs;
        ++result.steps_accepted;
        monitor();
      } else {
        ++result.steps_rejected;
      }
      step = std::min(h_cap, hs * detail::next_step_factor(err));
    }
    t = target;
    record(sample);
  }
  result.times[0] = 0.0;
  result.leakage_warning = result.max_leakage > 1e-6;
  return result;
}

SparseOp liouvillian_matrix(const OpenSystemModel& model) {
  const int d = model.space.dim();
  SparseOp id(d, d);
  id.setIdentity();
  const SparseOp& h = model.h_cond.mat;
  SparseOp h_conj = h.conjugate();

  SparseOp L = complexd(0, -1) * Eigen::kroneckerProduct(id, h).eval();
  L += complexd(0, 1) * Eigen::kroneckerProduct(h_conj, id).eval();
  for (const auto& j : model.jumps) {
    if (j.op.mat.nonZeros() == 0) continue;
    SparseOp r_conj = j.op.mat.conjugate();
    L += Eigen::kroneckerProduct(r_conj, j.op.mat).eval();
  }
  L.prune([](int, int, const complexd& v) { return v != complexd(0); });
  L.makeCompressed();
  return L;
}

}  // namespace cavitylink
