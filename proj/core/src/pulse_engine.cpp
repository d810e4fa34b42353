#include "nvsim/pulse_engine.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace nvsim {

namespace {

using Matrix9c = Eigen::Matrix<Complex, 9, 9>;
using Vector9c = Eigen::Matrix<Complex, 9, 1>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Beyond this generator norm * time the scaling-and-squaring exponential
// loses too many digits to trust.
constexpr double kMaxGeneratorNorm = 1e8;
constexpr double kTraceGuard = 1e-9;

Matrix9c kron(const Matrix3c& a, const Matrix3c& b) {
  Matrix9c out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
  return out;
}

Matrix3c frame_rotation(const Eigen::Vector3d& frame_hz, double t) {
  Matrix3c r = Matrix3c::Zero();
  for (int k = 0; k < 3; ++k)
    r(k, k) = std::exp(Complex{0.0, -kTwoPi * frame_hz(k) * t});
  return r;
}

Matrix3c unitary(const Matrix3c& h, double t) {
  const Matrix3c herm = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix3c> es(herm);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the Hamiltonian failed");
  Eigen::Vector3cd phases;
  for (int k = 0; k < 3; ++k)
    phases(k) = std::exp(Complex{0.0, -kTwoPi * es.eigenvalues()(k) * t});
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix9c lindbladian(const Matrix3c& h, std::span<const Dephasing> dephasing) {
  const Matrix3c id = Matrix3c::Identity();
  const Complex minus_i{0.0, -1.0};
  // Column-stacking convention: vec(A X B) = (B^T kron A) vec(X).
  Matrix9c gen = minus_i * kTwoPi * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& d : dephasing) {
    if (d.coherence_rate == 0.0)
      continue;
    Matrix3c l = Matrix3c::Zero();
    l(index_of(Level::Zero), index_of(Level::Zero)) = 1.0;
    l(index_of(d.level), index_of(d.level)) = -1.0;
    l *= std::sqrt(0.5 * d.coherence_rate);
    const Matrix3c ldl = l.adjoint() * l;
    gen += kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id);
  }
  return gen;
}

DensityMatrix3 checked_result(const Matrix3c& rho) {
  if (!rho.allFinite())
    throw NumericalError("propagation produced non-finite entries");
  if (std::abs(rho.trace() - Complex{1.0, 0.0}) > kTraceGuard)
    throw NumericalError("propagation failed to preserve the trace; step too large");
  return DensityMatrix3::unchecked(rho);
}

void check_duration(double duration_s) {
  if (!std::isfinite(duration_s) || duration_s < 0.0)
    throw InvalidParameter("duration must be finite and non-negative");
}

Matrix3c with_offset(const Matrix3c& h, double offset_hz) {
  if (offset_hz == 0.0)
    return h;
  Matrix3c out = h;
  out(index_of(Level::Plus), index_of(Level::Plus)) += offset_hz;
  out(index_of(Level::Minus), index_of(Level::Minus)) += offset_hz;
  return out;
}

// Deterministic evolution for one noise realisation: unitary, or Lindblad
// when any dissipator is active and the model asks for it.
Matrix3c evolve(const Matrix3c& rho, const Matrix3c& h, double t,
                std::span<const Dephasing> dephasing, bool use_lindblad) {
  bool dissipative = false;
  if (use_lindblad)
    for (const auto& d : dephasing) {
      if (!(d.coherence_rate >= 0.0) || !std::isfinite(d.coherence_rate))
        throw InvalidParameter("dephasing rate must be finite and non-negative");
      dissipative = dissipative || d.coherence_rate > 0.0;
    }

  if (!dissipative) {
    const Matrix3c u = unitary(h, t);
    return u * rho * u.adjoint();
  }

  const Matrix9c gen = lindbladian(h, dephasing) * t;
  if (gen.cwiseAbs().rowwise().sum().maxCoeff() > kMaxGeneratorNorm)
    throw NumericalError("generator norm too large for a single exponential; step too large");
  const Matrix9c prop = gen.exp();
  Matrix3c out;
  Eigen::Map<Vector9c>(out.data()) = prop * Eigen::Map<const Vector9c>(rho.data());
  return out;
}

// Same as propagate() but with an explicit static detuning and no
// quasistatic averaging.
DensityMatrix3 propagate_single(const DensityMatrix3& rho, const Matrix3c& h, double duration_s,
                                std::span<const Dephasing> dephasing, bool use_lindblad,
                                double offset_hz) {
  check_duration(duration_s);
  if (duration_s == 0.0)
    return rho;
  return checked_result(
      evolve(rho.matrix(), with_offset(h, offset_hz), duration_s, dephasing, use_lindblad));
}

Duration event_duration(const PulseEvent& ev, const SpinSystem& system) {
  if (ev.duration)
    return *ev.duration;
  if (ev.is_pulse() && ev.angle_pi)
    return system.channel(ev.channel).duration_for(*ev.angle_pi);
  throw InvalidParameter("event has neither a duration nor a flip angle");
}

// Symbolic pulses run for their exact length; only the reported clock is
// rounded to the picosecond. This keeps PI/2 + PI/2 identical to PI.
double event_seconds(const PulseEvent& ev, const SpinSystem& system) {
  if (ev.duration)
    return to_seconds(*ev.duration);
  if (!ev.is_pulse() || !ev.angle_pi)
    throw InvalidParameter("event has neither a duration nor a flip angle");
  const ChannelCalibration& cal = system.channel(ev.channel);
  cal.duration_for(*ev.angle_pi); // rejects bad angles and Rabi frequencies
  return *ev.angle_pi / (2.0 * cal.rabi_hz);
}

// One event in the interaction picture, for a fixed noise realisation.
DensityMatrix3 apply_single(const DensityMatrix3& rho, const PulseEvent& ev,
                            const SpinSystem& system, bool crosstalk, bool use_lindblad,
                            double start_s, double offset_hz) {
  const double t = event_seconds(ev, system);
  if (t < 0.0)
    throw InvalidParameter("event duration is negative");

  if (ev.kind == EventKind::Wait) {
    const Dephasing qubit{Level::Minus, system.mw1.dephasing_rate};
    return propagate_single(rho, Matrix3c::Zero(), t, std::span(&qubit, 1), use_lindblad,
                            offset_hz);
  }
  if (ev.kind != EventKind::MwPulse)
    throw InvalidParameter("apply_pulse handles microwave pulses and waits only");

  const ChannelCalibration& cal = system.channel(ev.channel);
  const Drive drive{cal, ev.phase};
  const RotatingHamiltonian rot = drive_hamiltonian(std::span(&drive, 1), system.levels(), crosstalk);
  // A coherence decay of 2R on the driven line gives a nutation envelope e^{-Rt}.
  const Dephasing deph{cal.target(), 2.0 * cal.dephasing_rate};

  const Matrix3c r0 = frame_rotation(rot.frame_hz, start_s);
  const Matrix3c r1 = frame_rotation(rot.frame_hz, start_s + t);
  const DensityMatrix3 in_frame = DensityMatrix3::unchecked(r0.adjoint() * rho.matrix() * r0);
  const DensityMatrix3 evolved =
      propagate_single(in_frame, rot.h, t, std::span(&deph, 1), use_lindblad, offset_hz);
  return DensityMatrix3::unchecked(r1 * evolved.matrix() * r1.adjoint());
}

RunResult run_single(const DensityMatrix3& rho0, const PulseSequence& seq,
                     const SpinSystem& system, bool crosstalk, bool use_lindblad,
                     const ReadoutConfig& readout, double offset_hz) {
  RunResult res{rho0, {}, Duration{0}};
  double clock_s = 0.0;
  for (std::size_t i = 0; i < seq.events.size(); ++i) {
    const PulseEvent& ev = seq.events[i];
    try {
      const Duration d = event_duration(ev, system);
      switch (ev.kind) {
      case EventKind::Laser:
        res.final_state = initialize_state(readout);
        break;
      case EventKind::Readout:
        res.readouts.push_back(res.final_state);
        break;
      case EventKind::Wait:
      case EventKind::MwPulse:
        res.final_state = apply_single(res.final_state, ev, system, crosstalk, use_lindblad,
                                       clock_s, offset_hz);
        break;
      }
      res.elapsed += d;
      clock_s += event_seconds(ev, system);
    } catch (const SequenceError&) {
      throw;
    } catch (const std::exception& e) {
      throw SequenceError(i, e.what());
    }
  }
  return res;
}

} // namespace

std::string_view to_string(DephasingModel m) {
  switch (m) {
  case DephasingModel::None: return "none";
  case DephasingModel::Lindblad: return "lindblad";
  case DephasingModel::Quasistatic: return "quasistatic";
  }
  return "?";
}

DephasingModel dephasing_model_from_string(std::string_view s) {
  if (s == "none") return DephasingModel::None;
  if (s == "lindblad") return DephasingModel::Lindblad;
  if (s == "quasistatic") return DephasingModel::Quasistatic;
  throw InvalidParameter("unknown dephasing model '" + std::string(s) + "'");
}

void SimOptions::validate() const {
  if (!(time_step_s > 0.0) || !std::isfinite(time_step_s))
    throw InvalidParameter("time_step must be positive");
  if (quasistatic_samples < 1)
    throw InvalidParameter("quasistatic_samples must be at least 1");
  if (!(quasistatic_sigma_hz >= 0.0) || !std::isfinite(quasistatic_sigma_hz))
    throw InvalidParameter("quasistatic_sigma must be non-negative");
}

SimOptions SimOptions::ideal() {
  SimOptions o;
  o.dephasing = DephasingModel::None;
  o.crosstalk = false;
  return o;
}

SequenceError::SequenceError(std::size_t event_index, const std::string& what)
    : std::runtime_error("event " + std::to_string(event_index) + ": " + what),
      index_(event_index) {}

RotatingHamiltonian drive_hamiltonian(std::span<const Drive> active, const LevelStructure& levels,
                                      bool crosstalk) {
  RotatingHamiltonian rot;
  bool seen[2] = {false, false};
  const int zero = index_of(Level::Zero);

  auto couple = [&](Level target, const Drive& d) {
    const int q = index_of(target);
    const double detuning = d.cal.carrier_hz - levels.transition(target);
    const Complex c = 0.5 * d.cal.rabi_hz * std::exp(Complex{0.0, d.phase});
    rot.h(zero, q) += c;
    rot.h(q, zero) += std::conj(c);
    rot.h(q, q) = -detuning;
    rot.frame_hz(q) = detuning;
  };

  for (const auto& d : active) {
    const int slot = d.cal.label == Channel::MW1 ? 0 : 1;
    if (seen[slot])
      throw InvalidParameter("two simultaneous pulses on channel " +
                             std::string(to_string(d.cal.label)));
    seen[slot] = true;
    couple(d.cal.target(), d);
  }
  // With both channels on, each line already sits in its own carrier's frame
  // and the cross terms rotate at ~2E; they are dropped.
  if (crosstalk && active.size() == 1) {
    const Drive& d = active.front();
    couple(d.cal.target() == Level::Minus ? Level::Plus : Level::Minus, d);
  }
  return rot;
}

std::pair<std::vector<double>, std::vector<double>> gauss_hermite_normal(int n) {
  if (n < 1)
    throw InvalidParameter("need at least one quadrature node");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jac(k, k - 1) = std::sqrt(static_cast<double>(k));
    jac(k - 1, k) = jac(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  std::vector<double> nodes(n), weights(n);
  for (int k = 0; k < n; ++k) {
    nodes[k] = es.eigenvalues()(k);
    weights[k] = es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
  }
  return {nodes, weights};
}

DensityMatrix3 propagate(const DensityMatrix3& rho, const Matrix3c& h, double duration_s,
                         std::span<const Dephasing> dephasing, const SimOptions& model) {
  model.validate();
  switch (model.dephasing) {
  case DephasingModel::None:
    return propagate_single(rho, h, duration_s, dephasing, false, 0.0);
  case DephasingModel::Lindblad:
    return propagate_single(rho, h, duration_s, dephasing, true, 0.0);
  case DephasingModel::Quasistatic: {
    check_duration(duration_s);
    const auto [nodes, weights] = gauss_hermite_normal(model.quasistatic_samples);
    Matrix3c acc = Matrix3c::Zero();
    for (std::size_t k = 0; k < nodes.size(); ++k)
      acc += weights[k] * propagate_single(rho, h, duration_s, dephasing, false,
                                           nodes[k] * model.quasistatic_sigma_hz)
                              .matrix();
    return checked_result(acc);
  }
  }
  throw InvalidParameter("unknown dephasing model");
}

DensityMatrix3 apply_pulse(const DensityMatrix3& rho, const PulseEvent& ev,
                           const SpinSystem& system, const SimOptions& opts, Duration start) {
  opts.validate();
  if (opts.dephasing != DephasingModel::Quasistatic)
    return apply_single(rho, ev, system, opts.crosstalk,
                        opts.dephasing == DephasingModel::Lindblad, to_seconds(start), 0.0);

  const auto [nodes, weights] = gauss_hermite_normal(opts.quasistatic_samples);
  Matrix3c acc = Matrix3c::Zero();
  for (std::size_t k = 0; k < nodes.size(); ++k)
    acc += weights[k] * apply_single(rho, ev, system, opts.crosstalk, false, to_seconds(start),
                                     nodes[k] * opts.quasistatic_sigma_hz)
                            .matrix();
  return checked_result(acc);
}

RunResult run_sequence(const DensityMatrix3& rho0, const PulseSequence& seq,
                       const SpinSystem& system, const SimOptions& opts,
                       const ReadoutConfig& readout) {
  opts.validate();
  if (opts.dephasing != DephasingModel::Quasistatic)
    return run_single(rho0, seq, system, opts.crosstalk,
                      opts.dephasing == DephasingModel::Lindblad, readout, 0.0);

  const auto [nodes, weights] = gauss_hermite_normal(opts.quasistatic_samples);
  Matrix3c final_acc = Matrix3c::Zero();
  std::vector<Matrix3c> readout_acc;
  Duration elapsed{0};
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const RunResult r = run_single(rho0, seq, system, opts.crosstalk, false, readout,
                                   nodes[k] * opts.quasistatic_sigma_hz);
    final_acc += weights[k] * r.final_state.matrix();
    readout_acc.resize(r.readouts.size(), Matrix3c::Zero());
    for (std::size_t j = 0; j < r.readouts.size(); ++j)
      readout_acc[j] += weights[k] * r.readouts[j].matrix();
    elapsed = r.elapsed;
  }
  RunResult out{checked_result(final_acc), {}, elapsed};
  for (const auto& m : readout_acc)
    out.readouts.push_back(checked_result(m));
  return out;
}

std::vector<NutationPoint> nutation_curve(const SpinSystem& system, Channel channel, double t_max_s,
                                          std::size_t n_points, const SimOptions& opts,
                                          const ReadoutConfig& readout) {
  if (n_points < 2)
    throw InvalidParameter("≥ 2 points required");
  if (!(t_max_s > 0.0) || !std::isfinite(t_max_s))
    throw InvalidParameter("t_max must be positive");
  system.validate();
  const DensityMatrix3 rho0 = initialize_state(readout);
  std::vector<NutationPoint> curve;
  curve.reserve(n_points);
  // Round the step, not each sample, so the grid stays exactly uniform.
  const Duration step = from_seconds(t_max_s / static_cast<double>(n_points - 1));
  if (step <= Duration{0})
    throw InvalidParameter("sampling step below 1 ps");
  for (std::size_t i = 0; i < n_points; ++i) {
    const Duration d = step * static_cast<std::int64_t>(i);
    const DensityMatrix3 rho = apply_pulse(rho0, PulseEvent::pulse_for(channel, d), system, opts);
    curve.push_back({to_seconds(d), fluorescence_signal(rho, readout).normalized});
  }
  return curve;
}

Matrix3c pulse_unitary(const PulseEvent& ev, const SpinSystem& system, bool crosstalk,
                       Duration start) {
  if (!ev.is_pulse())
    throw InvalidParameter("pulse_unitary needs a microwave pulse");
  const ChannelCalibration& cal = system.channel(ev.channel);
  const double t = event_seconds(ev, system);
  const Drive drive{cal, ev.phase};
  const RotatingHamiltonian rot = drive_hamiltonian(std::span(&drive, 1), system.levels(), crosstalk);
  const double t0 = to_seconds(start);
  return frame_rotation(rot.frame_hz, t0 + t) * unitary(rot.h, t) *
         frame_rotation(rot.frame_hz, t0).adjoint();
}

} // namespace nvsim
