#include <benchmark/benchmark.h>

#include "cournot/experiment.hpp"
#include "cournot/sppa.hpp"
#include "cournot/subqp.hpp"

namespace {

cournot::MarketInstance make(cournot::ExampleKind kind, int n) {
  cournot::ExperimentConfig cfg;
  cfg.example = kind;
  return cournot::generate_instance(cfg, n);
}

void BM_ProxStep(benchmark::State& state) {
  const auto inst = make(cournot::ExampleKind::Ex1Log, static_cast<int>(state.range(0)));
  const cournot::Vector x = inst.center();
  cournot::Vector s(inst.n());
  const double c = 1.0 / inst.lipschitz_gamma();
  for (auto _ : state) {
    cournot::prox_step(inst, x, c, s);
    benchmark::DoNotOptimize(s.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProxStep)->RangeMultiplier(10)->Range(10, 100000)->Complexity(benchmark::oN);

void BM_ProxStepPg(benchmark::State& state) {
  const auto inst = make(cournot::ExampleKind::Ex1Log, static_cast<int>(state.range(0)));
  const cournot::Vector x = inst.center();
  const double c = 1.0 / inst.lipschitz_gamma();
  for (auto _ : state) {
    auto res = cournot::box_pg_solve(cournot::prox_subproblem(inst, x, c), 1e-10, 100000, x);
    benchmark::DoNotOptimize(res.x.data());
  }
}
BENCHMARK(BM_ProxStepPg)->Arg(10)->Arg(100)->Arg(1000);

template <cournot::ExampleKind Kind>
void BM_Solve(benchmark::State& state) {
  const auto inst = make(Kind, static_cast<int>(state.range(0)));
  cournot::SolverConfig cfg;
  cfg.step_policy = state.range(1) == 0 ? cournot::StepPolicy::FixedC : cournot::StepPolicy::LineSearch;
  cfg.gamma_lb = 0.0;
  int iterations = 0;
  for (auto _ : state) {
    const auto out = cournot::run(inst, cfg, inst.center());
    iterations = out.result.iterations;
    benchmark::DoNotOptimize(out.result.x_final.data());
  }
  state.counters["outer_iterations"] = iterations;
}
BENCHMARK(BM_Solve<cournot::ExampleKind::Ex1Log>)
    ->ArgsProduct({{10, 50, 100, 500, 1000}, {0, 1}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Solve<cournot::ExampleKind::Ex2Exp>)
    ->ArgsProduct({{10, 50, 100, 500, 1000}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

void BM_ClassicalEquilibrium(benchmark::State& state) {
  const auto inst = make(cournot::ExampleKind::Affine, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto res = cournot::classical_equilibrium(inst);
    benchmark::DoNotOptimize(res.x.data());
  }
}
BENCHMARK(BM_ClassicalEquilibrium)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
