#include <numbers>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "spinlink/dynamics.hpp"
#include "spinlink/gaussian.hpp"
#include "spinlink/network.hpp"
#include "spinlink/transport.hpp"

using namespace spinlink;

namespace {

// Ch0 reversed, two normal channels, `memory` extra modes.
DriftDiffusion quantum_network(int memory) {
  ReservoirConfig res;
  res.exchange_rate = 0.02 * res.spin_decay;
  res.two_photon_detuning = res.larmor_frequency;
  res.memory_modes = memory;
  std::vector<ChannelConfig> chans(3);
  for (int k = 0; k < 3; ++k) {
    chans[k].id = k;
    chans[k].probe_on = false;
  }
  chans[0].polarization = Polarization::reversed;
  return drift_diffusion(build_network(chans, res));
}

void BM_SteadyState(benchmark::State& state) {
  const auto dd = quantum_network(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(steady_state_covariance(dd));
}
BENCHMARK(BM_SteadyState)->DenseRange(0, 5);

void BM_Discord(benchmark::State& state) {
  const auto sigma = CovarianceMatrix::two_mode_squeezed(0.4);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_discord(sigma));
}
BENCHMARK(BM_Discord);

void BM_NoiseSpectrum(benchmark::State& state) {
  const auto dd = quantum_network(1);
  const auto n = dd.n_modes();
  const std::vector<Observable> obs{quadrature_observable(n, 1, Quadrature::x, "x1"),
                                    quadrature_observable(n, 1, Quadrature::p, "p1")};
  const auto grid = uniform_grid(2.0 * std::numbers::pi * 352e3, 200.0,
                                 static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(noise_spectrum(dd, obs, grid));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NoiseSpectrum)->Arg(256)->Arg(4096);

void BM_Ensemble(benchmark::State& state) {
  const auto dd = quantum_network(1);
  EnsembleOptions opt;
  opt.dt = 0.5 * max_ensemble_step(dd.drift);
  opt.horizon = 200 * opt.dt;
  opt.n_trajectories = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(trajectory_ensemble(dd, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Ensemble)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_TransportSpectrum(benchmark::State& state) {
  const ReservoirConfig res;
  std::vector<ChannelConfig> chans(3);
  for (int k = 0; k < 3; ++k) chans[k].id = k;
  chans[2].control_phase = std::numbers::pi;
  const double w = eit_linewidth(chans[1].control_rabi, res.optical_decay, res.spin_decay);
  const auto grid = uniform_grid(0.0, 5.0 * w, 401);
  for (auto _ : state) benchmark::DoNotOptimize(transport_spectrum(chans, res, grid));
}
BENCHMARK(BM_TransportSpectrum);

}  // namespace

BENCHMARK_MAIN();
