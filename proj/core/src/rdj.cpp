#include "nvsim/rdj.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "nvsim/pulse_dsl.hpp"

namespace nvsim {

OracleId::OracleId(int index) : index_(index) {
  if (index < 1 || index > 4)
    throw InvalidParameter("oracle index must be 1..4, got " + std::to_string(index));
}

int OracleId::evaluate(int z) const {
  switch (index_) {
  case 1: return 0;
  case 2: return 1;
  case 3: return z;
  default: return 1 - z;
  }
}

std::array<OracleId, 4> OracleId::all() {
  return {OracleId{1}, OracleId{2}, OracleId{3}, OracleId{4}};
}

std::string_view to_string(Classification c) {
  return c == Classification::Constant ? "constant" : "balanced";
}

Matrix2c oracle_matrix(OracleId id) {
  Matrix2c v = Matrix2c::Zero();
  for (int z = 0; z < 2; ++z)
    v(z, z) = id.evaluate(z) == 0 ? 1.0 : -1.0;
  return v;
}

std::vector<PulseEvent> oracle_sequence(OracleId id) {
  // MW1 2PI is -1 on the qubit subspace; MW2 2PI flips the sign of |0> only,
  // because |-1> does not take part in the auxiliary transition.
  switch (id.index()) {
  case 1: return {};
  case 2: return {PulseEvent::pulse(Channel::MW1, 2.0)};
  case 3: return {PulseEvent::pulse(Channel::MW1, 2.0), PulseEvent::pulse(Channel::MW2, 2.0)};
  default: return {PulseEvent::pulse(Channel::MW2, 2.0)};
  }
}

PulseSequence build_rdj_program(OracleId id, Duration readout_window) {
  using namespace std::chrono_literals;
  PulseSequence seq;
  seq.name = "rdj_f" + std::to_string(id.index());
  seq.events.push_back(PulseEvent::laser(Duration{5us}));
  seq.events.push_back(PulseEvent::wait(Duration{5us}));
  seq.events.push_back(PulseEvent::pulse(Channel::MW1, 0.5));
  for (const auto& ev : oracle_sequence(id))
    seq.events.push_back(ev);
  seq.events.push_back(PulseEvent::pulse(Channel::MW1, 0.5));
  seq.events.push_back(PulseEvent::readout(readout_window));
  return merge_adjacent(seq);
}

Classification classify(double signal, double threshold) {
  return signal < threshold ? Classification::Constant : Classification::Balanced;
}

std::uint64_t oracle_seed(std::uint64_t base_seed, OracleId id) {
  // splitmix64 finaliser
  std::uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(id.index());
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RdjResult run_rdj(OracleId id, const SpinSystem& system, const RdjOptions& opts) {
  const PulseSequence program = build_rdj_program(id);
  const RunResult run =
      run_sequence(initialize_state(opts.readout), program, system, opts.sim, opts.readout);
  const DensityMatrix3& at_readout = run.readouts.empty() ? run.final_state : run.readouts.front();

  RdjResult res;
  res.oracle = id.index();
  res.p0 = at_readout.population(Level::Zero);
  res.signal = fluorescence_signal(at_readout, opts.readout).normalized;
  double decision = res.signal;
  if (opts.sample_shots) {
    res.shots = simulate_shots(std::clamp(res.signal, 0.0, 1.0), opts.readout,
                               oracle_seed(opts.seed, id));
    decision = res.shots->normalized;
  }
  res.classification = classify(decision, opts.threshold);
  return res;
}

std::vector<RdjResult> run_rdj_all(const SpinSystem& system, const RdjOptions& opts) {
  std::vector<std::future<RdjResult>> jobs;
  for (const OracleId id : OracleId::all())
    jobs.push_back(std::async(std::launch::async, [id, &system, &opts] {
      return run_rdj(id, system, opts);
    }));
  std::vector<RdjResult> out;
  for (auto& j : jobs)
    out.push_back(j.get());
  return out;
}

Matrix3c fragment_unitary(const std::vector<PulseEvent>& fragment, const SpinSystem& system) {
  Matrix3c u = Matrix3c::Identity();
  Duration clock{0};
  for (const auto& ev : fragment) {
    u = pulse_unitary(ev, system, false, clock) * u;
    clock += ev.duration ? *ev.duration : system.channel(ev.channel).duration_for(*ev.angle_pi);
  }
  return u;
}

double calibrate_dephasing_rate(const SpinSystem& system, double target_contrast) {
  if (!(target_contrast > 0.0 && target_contrast < 1.0))
    throw InvalidParameter("target contrast must lie in (0, 1)");
  std::vector<PulseSequence> programs;
  for (const OracleId id : OracleId::all())
    programs.push_back(build_rdj_program(id));

  auto contrast_at = [&](double rate) {
    SpinSystem s = system;
    s.mw1.dephasing_rate = rate;
    s.mw2.dephasing_rate = rate;
    return predicted_contrast(programs, s);
  };

  double lo = 0.0;
  double hi = 1e5;
  while (contrast_at(hi) > target_contrast) {
    hi *= 2.0;
    if (hi > 1e15)
      throw NumericalError("could not bracket the dephasing rate");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (contrast_at(mid) > target_contrast ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace nvsim
