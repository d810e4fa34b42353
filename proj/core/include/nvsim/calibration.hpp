#pragma once

#include "nvsim/sequence.hpp"
#include "nvsim/spin_core.hpp"

namespace nvsim {

/// One microwave channel. MW1 drives |0> <-> |-1> (the qubit line, f_low),
/// MW2 drives |0> <-> |+1> (the auxiliary line, f_high).
struct ChannelCalibration {
  Channel label = Channel::MW1;
  double carrier_hz = 0.0;
  double rabi_hz = 0.0;        // population oscillation frequency on resonance
  double dephasing_rate = 0.0; // 1/s, decay rate of the nutation envelope

  Level target() const { return label == Channel::MW1 ? Level::Minus : Level::Plus; }

  /// angle/(2*pi*rabi) with the angle given in units of pi.
  Duration duration_for(double angle_pi) const;
  double angle_pi_for(Duration d) const;

  void validate() const;
};

/// Zero-field parameters together with both channel calibrations.
struct SpinSystem {
  ZfsParams zfs;
  ChannelCalibration mw1{Channel::MW1};
  ChannelCalibration mw2{Channel::MW2};

  const ChannelCalibration& channel(Channel ch) const {
    return ch == Channel::MW1 ? mw1 : mw2;
  }
  ChannelCalibration& channel(Channel ch) { return ch == Channel::MW1 ? mw1 : mw2; }

  LevelStructure levels() const { return level_structure(zfs); }

  /// Both carriers placed exactly on the transition lines of `zfs`.
  static SpinSystem resonant(const ZfsParams& zfs, double rabi_mw1_hz, double rabi_mw2_hz,
                             double rate_mw1 = 0.0, double rate_mw2 = 0.0);

  void validate() const;
};

} // namespace nvsim
