#include <benchmark/benchmark.h>

#include <numbers>

#include "piston/dynamics.hpp"
#include "piston/fock.hpp"
#include "piston/response.hpp"

namespace {

using namespace piston;

SystemParams desk_params() {
  SystemParams p;
  p.omega_m = 1.0;
  p.omega = 5.0;
  p.lambda = 10.0;
  p.mass = 0.5;
  p.g = 0.01;
  return p;
}

void BM_ResponseClosedForm(benchmark::State& state) {
  const SystemParams p = desk_params();
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(response_closed_form(p, t));
    t += 1e-3;
  }
}
BENCHMARK(BM_ResponseClosedForm);

void BM_EnergyTransfer(benchmark::State& state) {
  const SystemParams p = desk_params();
  const GasSpec left = GasSpec::coherent(2.0);
  const GasSpec right = GasSpec::coherent(2.0, 0.5);
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(energy_transfer(p, left, right, t));
    t += 1e-3;
  }
}
BENCHMARK(BM_EnergyTransfer);

void BM_BuildHamiltonian(benchmark::State& state) {
  const SystemParams p = desk_params();
  const fock::ModeLayout layout{static_cast<int>(state.range(0)), 8};
  for (auto _ : state)
    benchmark::DoNotOptimize(fock::build_hamiltonian(p, layout, 50'000'000));
  state.SetComplexityN(static_cast<std::int64_t>(layout.dimension()));
}
BENCHMARK(BM_BuildHamiltonian)->Arg(2)->Arg(4)->Arg(6)->Complexity();

void BM_KrylovStep(benchmark::State& state) {
  const SystemParams p = desk_params();
  const fock::ModeLayout layout{static_cast<int>(state.range(0)), 8};
  const auto H = fock::build_hamiltonian(p, layout, 50'000'000);
  auto st = fock::prepare_state(GasSpec::fock(1), GasSpec::fock(1, 0.5),
                                MembraneSpec{0.0}, layout, 50'000'000);
  const double dt = 2.0 * std::numbers::pi / p.lambda / 20.0;
  for (auto _ : state) fock::evolve(st, H, dt);
  state.SetComplexityN(static_cast<std::int64_t>(layout.dimension()));
}
BENCHMARK(BM_KrylovStep)->Arg(2)->Arg(4)->Arg(6)->Complexity();

void BM_OracleRunFockPair(benchmark::State& state) {
  ScenarioConfig c;
  c.params = desk_params();
  c.left = GasSpec::fock(1);
  c.right = GasSpec::fock(1, 0.5);
  c.grid = {0.0, 6.0 * std::numbers::pi / c.params.lambda, 31};
  c.engine = Engine::Oracle;
  c.phonon_cutoff = 8;
  const ValidatedScenario scenario = validate(c);
  for (auto _ : state) benchmark::DoNotOptimize(fock::oracle_run(scenario));
}
BENCHMARK(BM_OracleRunFockPair)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
