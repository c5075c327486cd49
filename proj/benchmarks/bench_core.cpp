#include <benchmark/benchmark.h>

#include "dynabc/config.hpp"
#include "dynabc/operator_checks.hpp"
#include "dynabc/solver.hpp"

using namespace dynabc;

namespace {

SolverConfig bench_config(int nx, int ny) {
  RunConfig rc;
  rc.nx = nx;
  rc.ny = ny;
  rc.noise_modes = 16;
  rc.noise_sigma0 = 0.3;
  rc.initial = "sin-mode";
  return make_solver_config(rc);
}

void BM_ResolventSolve(benchmark::State& state) {
  const Grid g = Grid::strip(static_cast<int>(state.range(0)),
                             static_cast<int>(state.range(0)) / 2 + 1, 1, 1);
  const BulkSurfaceOperator op(g, 0.1);
  const FieldPair rhs = random_pair(g, 1, 0);
  op.resolvent(rhs, 0.1);  // warm the factorization cache
  for (auto _ : state) {
    benchmark::DoNotOptimize(op.resolvent(rhs, 0.1));
  }
  state.SetItemsProcessed(state.iterations() * g.num_nodes());
}
BENCHMARK(BM_ResolventSolve)->Arg(16)->Arg(32)->Arg(64)->Arg(128);

void BM_ImplicitStep(benchmark::State& state) {
  const SolverConfig cfg = bench_config(static_cast<int>(state.range(0)),
                                        static_cast<int>(state.range(0)) / 2 + 1);
  const BulkSurfaceOperator op(cfg.grid, cfg.eps);
  State s = cfg.initial.realize(cfg.grid, 1);
  std::uint32_t n = 0;
  for (auto _ : state) {
    s = step(op, cfg, s, 0, 0, n++, 1);
  }
  state.SetItemsProcessed(state.iterations() * cfg.grid.num_nodes());
}
BENCHMARK(BM_ImplicitStep)->Arg(16)->Arg(32)->Arg(64);

void BM_NoiseIncrement(benchmark::State& state) {
  const SolverConfig cfg = bench_config(32, 17);
  std::uint32_t n = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cfg.noise.sample_increment(cfg.grid, 1e-3, 1, 0, n++));
  }
}
BENCHMARK(BM_NoiseIncrement);

void BM_YosidaPoint(benchmark::State& state) {
  const MonotoneGraph g = MonotoneGraph::power(3);
  double r = -4.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.yosida(r, 0.1));
    r += 1e-4;
    if (r > 4) r = -4;
  }
}
BENCHMARK(BM_YosidaPoint);

void BM_EnergyEvaluation(benchmark::State& state) {
  const SolverConfig cfg = bench_config(32, 17);
  const State s = cfg.initial.realize(cfg.grid, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(energy_gl(cfg, s));
  }
}
BENCHMARK(BM_EnergyEvaluation);

}  // namespace

BENCHMARK_MAIN();
