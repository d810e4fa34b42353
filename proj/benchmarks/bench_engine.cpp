#include <benchmark/benchmark.h>

#include "nvsim/config.hpp"
#include "nvsim/pulse_dsl.hpp"
#include "nvsim/pulse_engine.hpp"
#include "nvsim/rdj.hpp"

using namespace nvsim;

namespace {

const SpinSystem& system_defaults() {
  static const SpinSystem sys = RunConfig::defaults().system;
  return sys;
}

SimOptions with_model(DephasingModel m) {
  SimOptions o;
  o.dephasing = m;
  return o;
}

} // namespace

static void BM_ApplyPulse(benchmark::State& state) {
  const auto model = static_cast<DephasingModel>(state.range(0));
  const auto opts = with_model(model);
  const auto ev = PulseEvent::pulse(Channel::MW1, 0.5);
  const auto rho = DensityMatrix3::basis_state(Level::Zero);
  for (auto _ : state)
    benchmark::DoNotOptimize(apply_pulse(rho, ev, system_defaults(), opts));
  state.SetLabel(std::string(to_string(model)));
}
BENCHMARK(BM_ApplyPulse)
    ->Arg(static_cast<int>(DephasingModel::None))
    ->Arg(static_cast<int>(DephasingModel::Lindblad))
    ->Arg(static_cast<int>(DephasingModel::Quasistatic));

static void BM_RunRdjAll(benchmark::State& state) {
  RdjOptions o;
  o.readout = ReadoutConfig{}.ideal();
  for (auto _ : state)
    benchmark::DoNotOptimize(run_rdj_all(system_defaults(), o));
}
BENCHMARK(BM_RunRdjAll)->Unit(benchmark::kMicrosecond);

static void BM_NutationCurve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(nutation_curve(system_defaults(), Channel::MW1, 1e-6, n, SimOptions{},
                                            ReadoutConfig{}.ideal()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NutationCurve)->Arg(200)->Arg(1001)->Unit(benchmark::kMicrosecond);

static void BM_Parse(benchmark::State& state) {
  const std::string src = "LASER 5us\nWAIT 5us\nMW1 PI/2\nMW1 2PI\nMW2 2PI PHASE 0.5\n"
                          "MW1 PI/2\nMW2 DUR 117.371ns\nREADOUT 300ns\n";
  std::string text;
  for (int i = 0; i < state.range(0); ++i)
    text += src;
  for (auto _ : state)
    benchmark::DoNotOptimize(parse(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_Parse)->Arg(1)->Arg(100);

static void BM_SerializeMerge(benchmark::State& state) {
  const auto seq = parse("MW1 PI/2\nMW1 PI/2\nMW2 2PI\nWAIT 1ns\nWAIT 2ns\nMW1 PI\n");
  for (auto _ : state)
    benchmark::DoNotOptimize(serialize(merge_adjacent(seq)));
}
BENCHMARK(BM_SerializeMerge);
