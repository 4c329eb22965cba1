// Serial reference vs OpenMP Monte Carlo on the optomechanical scenario.

#include <benchmark/benchmark.h>

#include "forcetrack/experiment.hpp"
#include "forcetrack/model.hpp"

namespace {

using namespace forcetrack;

struct Setup {
  DiscreteModel dm;
  ForceSignal force = force::GaussianIid{1.0, 0.5};
  FilterInit init;
  Vector x0 = Vector::Constant(2, 1e-6);

  Setup() : dm(discretize(build_optomechanical({5.88e-4, 1.76e5, 1e-14}), 1e-4)) {}
};

void run_ensemble(benchmark::State& state, bool parallel) {
  const Setup s;
  MonteCarloOptions options;
  options.parallel = parallel;
  const long runs = state.range(0);
  for (auto _ : state) {
    auto report = monte_carlo(s.dm, s.force, s.init, s.x0, 1000, runs, 7, options);
    benchmark::DoNotOptimize(report.grand_average_ratio);
  }
  state.SetItemsProcessed(state.iterations() * runs);
}

void BM_MonteCarloSerial(benchmark::State& state) { run_ensemble(state, false); }
void BM_MonteCarloParallel(benchmark::State& state) { run_ensemble(state, true); }

void BM_FilterStep(benchmark::State& state) {
  const Setup s;
  FilterState fs = init_state(s.x0, 1e-10 * Matrix::Identity(2, 2));
  const Vector y = Vector::Constant(1, 1e-6);
  for (auto _ : state) {
    auto step = update(fs, y, s.dm);
    benchmark::DoNotOptimize(step.state.x_hat.data());
  }
}

}  // namespace

BENCHMARK(BM_MonteCarloSerial)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FilterStep);

BENCHMARK_MAIN();
