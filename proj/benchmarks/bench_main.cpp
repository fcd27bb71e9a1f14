#include "frontlab/certifier.hpp"
#include "frontlab/front_tracking.hpp"
#include "frontlab/presets.hpp"
#include "frontlab/riemann.hpp"

#include <benchmark/benchmark.h>

using namespace frontlab;

namespace {

void BM_RiemannPSystem(benchmark::State& state) {
  const auto m = make_psystem();
  CounterRng rng(1);
  for (auto _ : state) {
    const State l = pair_state(rng.uniform(1.1, 1.4), rng.uniform(-0.1, 0.1));
    const State r = pair_state(rng.uniform(1.1, 1.4), rng.uniform(-0.1, 0.1));
    benchmark::DoNotOptimize(riemann_waves(*m, l, r));
  }
}
BENCHMARK(BM_RiemannPSystem);

void BM_FrontTrackingAdvance(benchmark::State& state) {
  const auto m = make_psystem();
  const auto u0 = preset_random_tv(*m, 3, 0.1, 8);
  const double delta = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    FrontTrackingRun run(m, u0, delta);
    run.advance(1.0);
    benchmark::DoNotOptimize(run.event_count());
  }
}
BENCHMARK(BM_FrontTrackingAdvance)->Arg(50)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_Certify(benchmark::State& state) {
  const auto m = make_burgers();
  const auto u0 = preset_shock(scalar_state(1.0), scalar_state(0.0));
  const auto sol = sample_evolution([u0](double t) { return u0.translated(0.5 * t); }, 0.01, 1.0, 3.0);
  const auto phis = bump_lattice(0.0, 1.0, -0.5, 1.0, 0.1, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(certify(*m, sol, 0.0, 1.0, phis, 1.0));
}
BENCHMARK(BM_Certify)->Unit(benchmark::kMillisecond);

void BM_Godunov(benchmark::State& state) {
  const auto m = make_burgers();
  const PiecewiseConstantFn u0({0.0, 1.0}, {scalar_state(0), scalar_state(1), scalar_state(0)});
  const double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(godunov_scheme(m, u0, eps, 1.0, 3.0));
}
BENCHMARK(BM_Godunov)->Arg(10)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
