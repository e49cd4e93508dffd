#include <benchmark/benchmark.h>

#include "hfsync/linsys.hpp"
#include "hfsync/portfolio.hpp"
#include "hfsync/simulate.hpp"
#include "hfsync/solver.hpp"

namespace {

hfsync::DgpOutput one_day(int n_assets) {
  hfsync::DgpConfig c;
  c.n_assets = n_assets;
  c.days = 1;
  c.seed = 42;
  return hfsync::simulate(c);
}

void BM_SolveRidge(benchmark::State& state) {
  const auto sim = one_day(static_cast<int>(state.range(0)));
  const auto sys = hfsync::build_system(sim.panel);
  const Eigen::MatrixXd w = Eigen::MatrixXd::Random(sys.n_assets(), sys.n_increments());
  for (auto _ : state) benchmark::DoNotOptimize(hfsync::solve_ridge(sys, w, 1e-2));
}
BENCHMARK(BM_SolveRidge)->Arg(20)->Arg(100);

void BM_Shrink(benchmark::State& state) {
  const Eigen::MatrixXd m = Eigen::MatrixXd::Random(state.range(0), 390);
  for (auto _ : state) benchmark::DoNotOptimize(hfsync::shrink(m, 0.5));
}
BENCHMARK(BM_Shrink)->Arg(20)->Arg(100);

void BM_AdmmStep(benchmark::State& state) {
  const auto sim = one_day(static_cast<int>(state.range(0)));
  const auto sys = hfsync::build_system(sim.panel);
  const hfsync::SolverConfig config;
  const auto s0 = hfsync::initial_state(sim.panel, config);
  for (auto _ : state) benchmark::DoNotOptimize(hfsync::admm_step(s0, sys, config));
}
BENCHMARK(BM_AdmmStep)->Arg(20)->Arg(100);

void BM_SynchronizeDay(benchmark::State& state) {
  const auto sim = one_day(static_cast<int>(state.range(0)));
  const hfsync::SolverConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(hfsync::synchronize(sim.panel, config));
}
BENCHMARK(BM_SynchronizeDay)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_MinVariance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Eigen::MatrixXd f = Eigen::MatrixXd::Random(n, 3);
  Eigen::MatrixXd sigma = f * f.transpose();
  sigma.diagonal().array() += 0.05;
  for (auto _ : state) benchmark::DoNotOptimize(hfsync::min_variance_weights(sigma, 1.2));
}
BENCHMARK(BM_MinVariance)->Arg(20)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
