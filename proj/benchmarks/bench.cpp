// Hot-path microbenchmarks: operator algebra, Liouvillian application,
// the adaptive master-equation integrator, both steady-state routes, and
// trajectory sampling. The range argument is the per-mode cutoff; a
// two-mode space has dimension (cutoff+1)^2 and the vectorized density
// matrix squares that again.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "cavitylink/fock.hpp"
#include "cavitylink/master.hpp"
#include "cavitylink/mcwf.hpp"
#include "cavitylink/model.hpp"

namespace {

using namespace cavitylink;

SystemParams bench_params() {
  SystemParams p;
  p.kappa1 = 1.0;
  p.kappa2 = 0.8;
  p.kappa_m = 5.0;
  p.omega1 = {0.4, 0.1};
  p.omega2 = {0.3, -0.2};
  p.xi1 = {1.0, 0.0};
  p.xi2 = {0.7, 0.4};
  return p;
}

void bench_operator_compose(benchmark::State& state) {
  const FockSpace space = make_space(2, static_cast<int>(state.range(0)));
  const Operator c0 = annihilation(space, 0);
  const Operator n1 = number_operator(space, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compose(adjoint(c0), compose(c0, n1)));
  }
  state.counters["dim"] = space.dim();
}

void bench_build_common(benchmark::State& state) {
  const SystemParams params = bench_params();
  const int cutoff = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_common(params, cutoff));
  }
}

void bench_liouvillian_apply(benchmark::State& state) {
  const OpenSystemModel model =
      build_common(bench_params(), static_cast<int>(state.range(0)));
  const SparseOp lv = liouvillian_matrix(model);
  VectorC v = VectorC::Random(lv.cols());
  v.normalize();
  VectorC out(lv.rows());
  for (auto _ : state) {
    out.noalias() = lv * v;
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["nnz"] = static_cast<double>(lv.nonZeros());
  state.SetItemsProcessed(state.iterations() * lv.nonZeros());
}

void bench_master_evolve(benchmark::State& state) {
  const OpenSystemModel model =
      build_common(bench_params(), static_cast<int>(state.range(0)));
  const QuantumState rho0 = vacuum_state(model.space);
  MasterOptions opts;
  opts.n_samples = 2;
  std::int64_t steps = 0;
  for (auto _ : state) {
    EvolutionResult res = evolve_master(model, rho0, 1.0, opts);
    steps += res.steps_accepted + res.steps_rejected;
    benchmark::DoNotOptimize(res.max_trace_drift);
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps),
                                                 benchmark::Counter::kIsRate);
}

void bench_steady_state(benchmark::State& state, const char* method) {
  const OpenSystemModel model =
      build_common(bench_params(), static_cast<int>(state.range(0)));
  SteadyStateOptions opts;
  opts.method = method;
  for (auto _ : state) {
    SteadyStateResult res = steady_state(model, opts);
    benchmark::DoNotOptimize(res.residual);
  }
}

void bench_mcwf_trajectories(benchmark::State& state) {
  const OpenSystemModel model = build_common(bench_params(), 5);
  const QuantumState psi0 = vacuum_state(model.space);
  const double dt = 0.08 / max_total_jump_rate(model);
  const int n_traj = static_cast<int>(state.range(0));
  McwfOptions opts;
  opts.n_samples = 2;
  opts.threads = 1;
  opts.keep_jump_records = false;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    TrajectoryEnsemble ens =
        mcwf_trajectories(model, psi0, 2.0, dt, n_traj, seed++, opts);
    benchmark::DoNotOptimize(ens.mean);
  }
  state.SetItemsProcessed(state.iterations() * n_traj);
}

}  // namespace

BENCHMARK(bench_operator_compose)->Arg(4)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_build_common)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_liouvillian_apply)->Arg(4)->Arg(6)->Arg(8)->Arg(12)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_master_evolve)->Arg(3)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_steady_state, sparse_lu, "sparse-lu")->Arg(3)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_steady_state, schur_gmres, "schur-gmres")->Arg(3)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_mcwf_trajectories)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
