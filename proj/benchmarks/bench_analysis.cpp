#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "nvsim/analysis.hpp"
#include "nvsim/readout.hpp"

using namespace nvsim;

namespace {

struct Curve {
  std::vector<double> t, y;
};

Curve noisy_curve(std::size_t n) {
  Curve c;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 0.02);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 1e-6 * static_cast<double>(i) / static_cast<double>(n - 1);
    c.t.push_back(t);
    c.y.push_back(0.5 + 0.5 * std::exp(-2e6 * t) * std::cos(2 * std::numbers::pi * 7.87e6 * t) +
                  g(rng));
  }
  return c;
}

} // namespace

static void BM_FitDampedSine(benchmark::State& state) {
  const auto c = noisy_curve(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(fit_damped_sine(c.t, c.y));
}
BENCHMARK(BM_FitDampedSine)->Arg(200)->Arg(2000)->Unit(benchmark::kMicrosecond);

static void BM_FftRabiFrequency(benchmark::State& state) {
  const auto c = noisy_curve(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(fft_rabi_frequency(c.t, c.y));
}
BENCHMARK(BM_FftRabiFrequency)->Arg(200)->Arg(2000);

static void BM_SimulateShots(benchmark::State& state) {
  const ReadoutConfig cfg;
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_shots(0.4, cfg, ++seed));
}
BENCHMARK(BM_SimulateShots);
