#pragma once

#include <cstdint>
#include <span>

#include "nvsim/calibration.hpp"
#include "nvsim/sequence.hpp"
#include "nvsim/state.hpp"

namespace nvsim {

struct ReadoutConfig {
  double init_fidelity = 0.9;      // probability of |0> after laser polarisation
  double rate_bright_cps = 1.0e5;  // fluorescence rate of |0>
  double rate_dark_cps = 0.7e5;    // fluorescence rate of |+1>, |-1>
  double window_s = 300e-9;        // photon counting window per repetition
  std::uint64_t n_averages = 50'000'000;

  void validate() const;
  /// Same rates and window with perfect polarisation.
  ReadoutConfig ideal() const;
};

/// p|0><0| + (1-p)/2 (|+1><+1| + |-1><-1|). Diagonal: the laser erases
/// coherence.
DensityMatrix3 initialize_state(const ReadoutConfig& cfg);

struct Fluorescence {
  double raw_rate_cps = 0.0;
  double normalized = 0.0; // equals <0|rho|0>
};

Fluorescence fluorescence_signal(const DensityMatrix3& rho, const ReadoutConfig& cfg);

struct ShotSample {
  std::uint64_t counts = 0;
  double normalized = 0.0; // not clipped; shot noise can leave [0,1]
};

/// Poisson photon count over n_averages repetitions, renormalised with the
/// bright/dark rates. Deterministic for a given seed.
ShotSample simulate_shots(double normalized, const ReadoutConfig& cfg, std::uint64_t seed);

/// Standard deviation of simulate_shots(normalized, cfg, .).normalized.
double shot_noise_sigma(double normalized, const ReadoutConfig& cfg);

struct Compensated {
  double value = 0.0;
  bool clipped = false;
};

/// 0.5 + (raw - 0.5)/V, clipped to [0,1].
Compensated compensate_dephasing(double raw_signal, double visibility);

/// exp(-sum of R_channel * duration) over the microwave events of `program`.
/// Symbolic pulses are resolved against `system` first.
double predicted_visibility(const PulseSequence& program, const SpinSystem& system);

/// Mean predicted_visibility over a set of programs: the expected contrast.
double predicted_contrast(std::span<const PulseSequence> programs, const SpinSystem& system);

} // namespace nvsim
