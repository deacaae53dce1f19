#include <benchmark/benchmark.h>

#include <tanklab/config.hpp>
#include <tanklab/fuzzy.hpp>
#include <tanklab/pid.hpp>
#include <tanklab/plant.hpp>
#include <tanklab/sim.hpp>

namespace {

void BM_NonlinearDerivatives(benchmark::State& state) {
  const tanklab::TankParams p{};
  const tanklab::TankState s{22.0, 9.0, 140.0};
  const tanklab::Inflows in{0.0, 0.0, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(tanklab::nonlinear_derivatives(s, in, p));
  }
}
BENCHMARK(BM_NonlinearDerivatives);

void BM_IntegrateStep(benchmark::State& state) {
  const tanklab::TankParams p{};
  tanklab::TankState s{22.0, 9.0, 140.0};
  const tanklab::Inflows in{139.2, 0.0, 0.0};
  for (auto _ : state) {
    tanklab::integrate_step(s, in, p, 0.01);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_IntegrateStep);

void BM_Linearize(benchmark::State& state) {
  const tanklab::TankParams p{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(tanklab::linearize(p, 22.0, 9.0));
  }
}
BENCHMARK(BM_Linearize);

void BM_PidStep(benchmark::State& state) {
  const tanklab::PidGains g{83.5, 14.5, 120.0};
  tanklab::PidState c;
  double e = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tanklab::pid_step(c, e, 0.01, g, 0.0, 300.0));
    e = -e;
  }
}
BENCHMARK(BM_PidStep);

void BM_FuzzyInfer(benchmark::State& state) {
  const tanklab::FuzzyScheduler s =
      tanklab::make_default_scheduler({83.5, 14.5, 120.0}, 1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tanklab::infer(s, 0.3, -0.2));
  }
}
BENCHMARK(BM_FuzzyInfer);

// Ten simulated seconds of the stock step scenario, both controller kinds.
void BM_ScenarioPid(benchmark::State& state) {
  tanklab::Config cfg = tanklab::default_config();
  tanklab::Scenario sc = cfg.step_scenario;
  sc.duration = 10.0;
  sc.controller_kind = tanklab::ControllerKind::pid;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tanklab::run_scenario(sc, cfg.plant, &cfg.pid));
  }
}
BENCHMARK(BM_ScenarioPid);

void BM_ScenarioScheduled(benchmark::State& state) {
  tanklab::Config cfg = tanklab::default_config();
  tanklab::Scenario sc = cfg.step_scenario;
  sc.duration = 10.0;
  sc.controller_kind = tanklab::ControllerKind::fuzzy_pid;
  const tanklab::FuzzyScheduler scheduler = tanklab::build_scheduler(cfg, sc);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        tanklab::run_scenario(sc, cfg.plant, nullptr, &scheduler));
  }
}
BENCHMARK(BM_ScenarioScheduled);

}  // namespace

BENCHMARK_MAIN();
