#include <benchmark/benchmark.h>

#include "sitesel/optomechanics.hpp"
#include "sitesel/selection.hpp"
#include "sitesel/spectroscopy.hpp"
#include "sitesel/statistics.hpp"

using namespace sitesel;

namespace {

const double kStark = angular_from_hz(32.7e3);

SelectionSequence pulses(std::size_t n, double ratio) {
  SelectionSequence s;
  s.pulses.assign(n, PulseSpec{ratio * kStark, 0.0, kStark});
  return s;
}

}  // namespace

// Density quadrature: cost grows as the window narrows.
static void BM_SelectDensity(benchmark::State& state) {
  const double ratio = 1.0 / static_cast<double>(state.range(0));
  const auto seq = pulses(2, ratio);
  for (auto _ : state) {
    const auto sel = select_density(CouplingDensity::arcsine(), seq);
    benchmark::DoNotOptimize(compute_stats(sel.density).mean_coupling);
  }
}
BENCHMARK(BM_SelectDensity)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_TradeoffCurve(benchmark::State& state) {
  const auto grid = log_grid(1e-3, 0.5, 20);
  const auto seq = pulses(static_cast<std::size_t>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(tradeoff_curve(seq, grid, 0.0));
}
BENCHMARK(BM_TradeoffCurve)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_ParticleSequence(benchmark::State& state) {
  const CavityGeometry geo;
  SampleOptions o;
  o.atoms = static_cast<std::size_t>(state.range(0));
  const auto ens = sample_ensemble(o, geo);
  const auto seq = pulses(2, 0.0624);
  for (auto _ : state) benchmark::DoNotOptimize(run_sequence(ens, seq, geo, 1).retained());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ParticleSequence)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_Spectrum(benchmark::State& state) {
  const auto d = select_density(CouplingDensity::arcsine(), pulses(1, 0.0624)).density;
  const auto grid = detuning_grid(kStark, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        synthesize_spectrum(d, angular_from_hz(170.0), kStark, grid, 1e4, 1.0).cavity_shift);
}
BENCHMARK(BM_Spectrum)->Arg(51)->Arg(201)->Unit(benchmark::kMillisecond);

static void BM_EquilibriumShift(benchmark::State& state) {
  const CavityGeometry geo;
  const auto method = static_cast<DisplacementMethod>(state.range(0));
  double phi = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(equilibrium_shift(phi, 0.033, geo, method));
    phi += 1e-3;
    if (phi > pi) phi = 0.0;
  }
}
BENCHMARK(BM_EquilibriumShift)->Arg(0)->Arg(1);

static void BM_ToggleDensity(benchmark::State& state) {
  const CavityGeometry geo;
  const TrapModel trap;
  const auto d = select_density(CouplingDensity::arcsine(), pulses(2, 0.08)).density;
  for (auto _ : state)
    benchmark::DoNotOptimize(toggle_experiment(d, 1e5, trap, geo).fractional_amplitude);
}
BENCHMARK(BM_ToggleDensity)->Unit(benchmark::kMillisecond);

static void BM_RadialBreathing(benchmark::State& state) {
  const CavityGeometry geo;
  const TrapModel trap;
  SampleOptions o;
  o.atoms = 2000;
  const auto ens = sample_ensemble(o, geo);
  BreathingOptions bo;
  bo.samples = 1024;
  bo.phase_space = static_cast<PhaseSpace>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(radial_breathing(ens, trap, geo, bo).shift);
}
BENCHMARK(BM_RadialBreathing)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
