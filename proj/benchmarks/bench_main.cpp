#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "svlab/action_lab.hpp"
#include "svlab/sde_engine.hpp"

using namespace svlab;

static void BM_FieldEvaluate(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const FourierVectorField f = random_divergence_free(int(state.range(0)), rng);
  Vec2 x{0.3, 1.7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.evaluate(x));
    x.x += 1e-3;
  }
}
BENCHMARK(BM_FieldEvaluate)->Arg(2)->Arg(8)->Arg(16);

static void BM_FieldJacobian(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const FourierVectorField f = random_divergence_free(int(state.range(0)), rng);
  Vec2 x{0.3, 1.7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.gradient_tensor(x));
    x.y += 1e-3;
  }
}
BENCHMARK(BM_FieldJacobian)->Arg(2)->Arg(8);

static void BM_NsStep(benchmark::State& state) {
  const int K = int(state.range(0));
  const NsStepper stepper(K, 0.1);
  std::mt19937_64 rng(3);
  FourierVectorField u = random_divergence_free(K, rng);
  for (auto _ : state) {
    u = stepper.step(u, 1e-3);
    benchmark::DoNotOptimize(u);
  }
}
BENCHMARK(BM_NsStep)->Arg(8)->Arg(16)->Arg(32);

static void BM_ItoTaylorGreen(benchmark::State& state) {
  const auto tg = std::make_shared<const TimeDependentVelocity>(taylor_green(0.1, 1.0, 100, 2));
  SdeParams p;
  p.drift = Drift::velocity(tg, TimeOrientation::forward);
  const std::size_t paths = std::size_t(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_ito(p, paths, 100, 42, {1, false}));
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(paths) * 100);
}
BENCHMARK(BM_ItoTaylorGreen)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_StratonovichBasis(benchmark::State& state) {
  const BasisIndexSet basis(3.0, int(state.range(0)), 0.1);
  SdeParams p;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_stratonovich_basis(p, basis, 100, 100, 42, {1, false}));
  }
  state.SetItemsProcessed(state.iterations() * 100 * 100);
}
BENCHMARK(BM_StratonovichBasis)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_Action(benchmark::State& state) {
  const auto tg = std::make_shared<const TimeDependentVelocity>(taylor_green(0.1, 1.0, 100, 2));
  SdeParams p;
  p.drift = Drift::velocity(tg, TimeOrientation::reversed);
  const auto ens = simulate_ito(p, 2000, 100, 42, {1, false});
  for (auto _ : state) benchmark::DoNotOptimize(action(ens));
}
BENCHMARK(BM_Action)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
