#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nvsim/calibration.hpp"
#include "nvsim/readout.hpp"
#include "nvsim/sequence.hpp"
#include "nvsim/state.hpp"

namespace nvsim {

enum class DephasingModel { None, Lindblad, Quasistatic };

std::string_view to_string(DephasingModel m);
DephasingModel dephasing_model_from_string(std::string_view s);

struct SimOptions {
  DephasingModel dephasing = DephasingModel::Lindblad;
  bool crosstalk = false;
  double time_step_s = 1e-9;          // sampling grid and validation tolerance
  int quasistatic_samples = 64;       // Gauss-Hermite nodes
  double quasistatic_sigma_hz = 2e6;  // width of the static detuning distribution

  void validate() const;
  static SimOptions ideal();
};

class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised by run_sequence; carries the index of the failing event.
class SequenceError : public std::runtime_error {
public:
  SequenceError(std::size_t event_index, const std::string& what);
  std::size_t event_index() const { return index_; }

private:
  std::size_t index_;
};

struct Drive {
  ChannelCalibration cal;
  double phase = 0.0;
};

/// Static Hamiltonian in the frame co-rotating with the active carriers.
/// `frame_hz(k)` is the carrier detuning of level k that defines the frame:
/// interaction-picture states relate to rotating-frame states by
/// U(t) = exp(-i 2 pi t diag(frame_hz)).
struct RotatingHamiltonian {
  Matrix3c h = Matrix3c::Zero();
  Eigen::Vector3d frame_hz = Eigen::Vector3d::Zero();
};

/// Rotating-wave drive Hamiltonian (Hz). Each drive couples |0> to its
/// target level with (rabi/2) e^{i phase}; the target level carries
/// -(carrier - line) on the diagonal. With crosstalk a lone drive also
/// couples the other line at its own (2E-offset) detuning. Throws
/// InvalidParameter for two drives on one channel.
RotatingHamiltonian drive_hamiltonian(std::span<const Drive> active, const LevelStructure& levels,
                                      bool crosstalk);

/// Pure dephasing of the |0> <-> `level` transition: rho(0, level) decays
/// at `coherence_rate` (1/s) through L = sqrt(rate/2) (|0><0| - |q><q|).
struct Dephasing {
  Level level = Level::Minus;
  double coherence_rate = 0.0;
};

/// Evolves rho for `duration_s` under constant H (Hz). `model` selects
/// unitary evolution, Lindblad dephasing with the listed dissipators, or an
/// average over Gauss-Hermite distributed static detunings of both |+-1>
/// levels. Exact for piecewise-constant generators.
DensityMatrix3 propagate(const DensityMatrix3& rho, const Matrix3c& h, double duration_s,
                         std::span<const Dephasing> dephasing, const SimOptions& model);

/// Single event on the interaction-picture state. `start` is the absolute
/// time at which the event begins; it fixes the rotating-frame phase of
/// detuned drives. Laser and Readout events are rejected here.
DensityMatrix3 apply_pulse(const DensityMatrix3& rho, const PulseEvent& ev,
                           const SpinSystem& system, const SimOptions& opts,
                           Duration start = Duration{0});

struct RunResult {
  DensityMatrix3 final_state;
  std::vector<DensityMatrix3> readouts; // state at the start of each READOUT
  Duration elapsed{0};
};

/// Folds events in order. LASER re-polarises via initialize_state; READOUT
/// records the state and leaves it untouched. Quasistatic noise is held
/// fixed across a whole run and averaged over runs.
RunResult run_sequence(const DensityMatrix3& rho0, const PulseSequence& seq,
                       const SpinSystem& system, const SimOptions& opts,
                       const ReadoutConfig& readout);

struct NutationPoint {
  double t_s = 0.0;
  double signal = 0.0;
};

/// init -> pulse of length t on `channel` -> normalised fluorescence, for
/// t on a uniform grid [0, t_max] with n_points samples.
std::vector<NutationPoint> nutation_curve(const SpinSystem& system, Channel channel, double t_max_s,
                                          std::size_t n_points, const SimOptions& opts,
                                          const ReadoutConfig& readout);

/// Unitary of a single microwave pulse (model None) in the interaction
/// picture, for a pulse beginning at `start`.
Matrix3c pulse_unitary(const PulseEvent& ev, const SpinSystem& system, bool crosstalk = false,
                       Duration start = Duration{0});

/// Gauss-Hermite nodes and weights for a standard normal variable.
std::pair<std::vector<double>, std::vector<double>> gauss_hermite_normal(int n);

} // namespace nvsim
