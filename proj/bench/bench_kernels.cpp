// Serial references against their OpenMP counterparts, plus the fast
// ball-covariance kernel against the cubic loop.

#include <benchmark/benchmark.h>

#include <array>
#include <numeric>
#include <vector>

#include "sisgoal/bootstrap.hpp"
#include "sisgoal/glm.hpp"
#include "sisgoal/screening.hpp"
#include "sisgoal/selection.hpp"
#include "sisgoal/simulation.hpp"

using namespace sisgoal;

namespace {

Dataset scenario(Index n, Index p) {
  ScenarioConfig config;
  config.n = n;
  config.p = p;
  return simulate_dataset(config, 11);
}

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void kernel_args(benchmark::internal::Benchmark* b) {
  for (int n : {50, 100, 200, 400}) b->Arg(n);
}

void BM_BallCovFast(benchmark::State& state) {
  const Dataset d = scenario(state.range(0), 6);
  const std::vector<double> x(d.X.col(0).begin(), d.X.col(0).end());
  const std::vector<double> y(d.Y.begin(), d.Y.end());
  const std::vector<double> a(d.A.begin(), d.A.end());
  for (auto _ : state) benchmark::DoNotOptimize(cond_ball_cov2(x, y, a));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BallCovFast)->Apply(kernel_args)->Complexity();

void BM_BallCovCubic(benchmark::State& state) {
  const Dataset d = scenario(state.range(0), 6);
  const std::vector<double> x(d.X.col(0).begin(), d.X.col(0).end());
  const std::vector<double> y(d.Y.begin(), d.Y.end());
  const std::vector<double> a(d.A.begin(), d.A.end());
  for (auto _ : state) benchmark::DoNotOptimize(cond_ball_cov2_cubic(x, y, a));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BallCovCubic)->Apply(kernel_args)->Complexity();

// Arg 0: serial, 1: OpenMP.
void BM_ScreeningScores(benchmark::State& state) {
  const Dataset d = scenario(300, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(screening_scores(d, exec_of(state)));
}
BENCHMARK(BM_ScreeningScores)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TuningGrid(benchmark::State& state) {
  const Dataset d = standardize(scenario(300, 52));
  const OutcomeFit outcome = fit_outcome(d);
  for (auto _ : state)
    benchmark::DoNotOptimize(select_by_wamd(d.X, d.A, outcome, TuningGrid::defaults(),
                                            Method::goal, {}, exec_of(state)));
}
BENCHMARK(BM_TuningGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Bootstrap(benchmark::State& state) {
  const Dataset d = scenario(300, 20);
  BootstrapOptions opt;
  opt.B = 20;
  opt.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_ate(d, opt).se);
}
BENCHMARK(BM_Bootstrap)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Replications(benchmark::State& state) {
  ScenarioConfig config;
  config.n = 300;
  config.p = 100;
  const std::array<Method, 2> methods = {Method::goal, Method::oal};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        run_replications(config, methods, 4, TuningGrid::defaults(), {}, exec_of(state)));
}
BENCHMARK(BM_Replications)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
