#include "cavitylink/mcwf.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cavitylink/detail/rng.hpp"

namespace cavitylink {

namespace {

// Classic RK4 for the drift d psi/dt = -i H psi. The conditional Hamiltonian
// is non-Hermitian, so the norm decays; callers renormalize.
struct DriftStepper {
  const SparseOp& h;
  VectorC k1, k2, k3, k4, tmp;

  explicit DriftStepper(const SparseOp& h_cond) : h(h_cond) {
    const Eigen::Index d = h.rows();
    k1.resize(d);
    k2.resize(d);
    k3.resize(d);
    k4.resize(d);
    tmp.resize(d);
  }

  void rhs(const VectorC& y, VectorC& out) {
    out.noalias() = h * y;
    out *= complexd(0.0, -1.0);
  }

  void step(VectorC& y, double hs) {
    rhs(y, k1);
    tmp = y + (0.5 * hs) * k1;
    rhs(tmp, k2);
    tmp = y + (0.5 * hs) * k2;
    rhs(tmp, k3);
    tmp = y + hs * k3;
    rhs(tmp, k4);
    y += (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

}  // namespace

double max_total_jump_rate(const OpenSystemModel& model) {
  const int d = model.space.dim();
  SparseOp s(d, d);
  for (const auto& j : model.jumps) s += SparseOp(j.op.mat.adjoint()) * j.op.mat;
  VectorC x = VectorC::Constant(d, complexd(1.0, 0.0) / std::sqrt(double(d)));
  VectorC y(d);
  double lambda = 0.0;
  for (int it = 0; it < 80; ++it) {
    y.noalias() = s * x;
    double n = y.norm();
    if (n < 1e-300) return 0.0;
    lambda = x.dot(y).real();
    x = y / n;
  }
  return lambda;
}

TrajectoryEnsemble mcwf_trajectories(const OpenSystemModel& model, const QuantumState& psi0,
                                     double t_final, double dt, int n_trajectories,
                                     std::uint64_t seed, const McwfOptions& opts) {
  if (n_trajectories < 1) throw std::invalid_argument("need at least one trajectory");
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (!(t_final > 0.0)) throw std::invalid_argument("final time must be positive");
  if (!psi0.pure)
    throw std::invalid_argument("trajectory unraveling needs a pure initial state");
  if (!(psi0.space == model.space))
    throw std::invalid_argument("initial state and model live on different spaces");

  const double rate = max_total_jump_rate(model);
  if (rate * dt > 0.1) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "time step %.3g too coarse: the total jump rate reaches %.3g, so a step "
                  "must stay below %.3g",
                  dt, rate, 0.1 / rate);
    throw std::invalid_argument(msg);
  }

  std::vector<Operator> obs = opts.observables;
  if (obs.empty())
    for (int k = 0; k < model.space.n_modes; ++k)
      obs.push_back(number_operator(model.space, k));
  const int n_obs = static_cast<int>(obs.size());
  const int n_samples = opts.n_samples < 2 ? 2 : opts.n_samples;
  const int n_jumps = static_cast<int>(model.jumps.size());

  std::vector<double> times(n_samples);
  for (int i = 0; i < n_samples; ++i) times[i] = t_final * i / (n_samples - 1);
  const double delta = t_final / (n_samples - 1);
  const int n_sub = std::max(1, static_cast<int>(std::ceil(delta / dt - 1e-9)));
  const double h = delta / n_sub;

  std::vector<std::vector<double>> samples(n_trajectories);
  std::vector<std::vector<JumpRecord>> records(n_trajectories);
  std::vector<std::vector<long>> counts(n_trajectories,
                                        std::vector<long>(n_jumps, 0));

#ifdef _OPENMP
  const int n_threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
#endif
  for (int traj = 0; traj < n_trajectories; ++traj) {
    std::mt19937_64 engine =
        detail::trajectory_engine(seed, static_cast<std::uint64_t>(traj));
    DriftStepper drift(model.h_cond.mat);
    VectorC psi = psi0.psi;
    VectorC jv(psi.size());
    std::vector<double> w(n_jumps);

    samples[traj].resize(static_cast<std::size_t>(n_obs) * n_samples);
    auto record_sample = [&](int s) {
      for (int k = 0; k < n_obs; ++k) {
        jv.noalias() = obs[k].mat * psi;
        samples[traj][static_cast<std::size_t>(k) * n_samples + s] = psi.dot(jv).real();
      }
    };
    record_sample(0);

    for (int s = 1; s < n_samples; ++s) {
      const double base = times[s - 1];
      for (int sub = 0; sub < n_sub; ++sub) {
        double wsum = 0.0;
        for (int x = 0; x < n_jumps; ++x) {
          jv.noalias() = model.jumps[x].op.mat * psi;
          w[x] = jv.squaredNorm();
          wsum += w[x];
        }
        const double r = detail::uniform01(engine);
        if (r >= wsum * h) {
          drift.step(psi, h);
          psi /= psi.norm();
          continue;
        }

        // A jump fires inside this step. One bisection against the linear
        // hazard places it in the first or second half; the jump acts at
        // that half's midpoint.
        const double tau = r < 0.5 * wsum * h ? 0.25 * h : 0.75 * h;
        drift.step(psi, tau);
        psi /= psi.norm();
        double vsum = 0.0;
        for (int x = 0; x < n_jumps; ++x) {
          jv.noalias() = model.jumps[x].op.mat * psi;
          w[x] = jv.squaredNorm();
          vsum += w[x];
        }
        if (vsum <= 0.0) {  // nothing left to emit at the refined time
          drift.step(psi, h - tau);
          psi /= psi.norm();
          continue;
        }
        const double r2 = detail::uniform01(engine) * vsum;
        int channel = n_jumps - 1;
        double acc = 0.0;
        for (int x = 0; x < n_jumps; ++x) {
          acc += w[x];
          if (r2 <= acc) {
            channel = x;
            break;
          }
        }
        jv.noalias() = model.jumps[channel].op.mat * psi;
        psi = jv / jv.norm();
        drift.step(psi, h - tau);
        psi /= psi.norm();
        ++counts[traj][channel];
        if (opts.keep_jump_records)
          records[traj].push_back({base + sub * h + tau, channel});
      }
      record_sample(s);
    }
  }

  TrajectoryEnsemble out;
  out.n_trajectories = n_trajectories;
  out.seed = seed;
  out.times = std::move(times);
  for (const auto& j : model.jumps) out.channel_labels.push_back(j.label);
  out.mean.assign(n_obs, std::vector<double>(n_samples, 0.0));
  out.std_error.assign(n_obs, std::vector<double>(n_samples, 0.0));
  // Fixed trajectory-order reduction: results do not depend on thread count.
  for (int k = 0; k < n_obs; ++k) {
    for (int i = 0; i < n_samples; ++i) {
      const std::size_t slot = static_cast<std::size_t>(k) * n_samples + i;
      double sum = 0.0;
      for (int traj = 0; traj < n_trajectories; ++traj) sum += samples[traj][slot];
      const double mean = sum / n_trajectories;
      out.mean[k][i] = mean;
      if (n_trajectories > 1) {
        double ss = 0.0;
        for (int traj = 0; traj < n_trajectories; ++traj) {
          const double d = samples[traj][slot] - mean;
          ss += d * d;
        }
        out.std_error[k][i] =
            std::sqrt(ss / (double(n_trajectories - 1) * n_trajectories));
      }
    }
  }
  out.jump_counts.assign(n_jumps, 0);
  for (int traj = 0; traj < n_trajectories; ++traj)
    for (int x = 0; x < n_jumps; ++x) out.jump_counts[x] += counts[traj][x];
  if (opts.keep_jump_records) out.jump_records = std::move(records);
  return out;
}

}  // namespace cavitylink
