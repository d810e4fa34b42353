#include "nvsim/calibration.hpp"

#include <cmath>
#include <string>

namespace nvsim {

Duration ChannelCalibration::duration_for(double angle_pi) const {
  if (!(rabi_hz > 0.0))
    throw InvalidParameter(std::string(to_string(label)) + ": Rabi frequency must be positive");
  if (!(angle_pi >= 0.0) || !std::isfinite(angle_pi))
    throw InvalidParameter("flip angle must be finite and non-negative");
  return from_seconds(angle_pi / (2.0 * rabi_hz));
}

double ChannelCalibration::angle_pi_for(Duration d) const {
  return 2.0 * rabi_hz * to_seconds(d);
}

void ChannelCalibration::validate() const {
  const std::string name{to_string(label)};
  if (!(rabi_hz > 0.0) || !std::isfinite(rabi_hz))
    throw InvalidParameter(name + ": Rabi frequency must be positive");
  if (!(dephasing_rate >= 0.0) || !std::isfinite(dephasing_rate))
    throw InvalidParameter(name + ": dephasing rate must be non-negative");
  if (!std::isfinite(carrier_hz))
    throw InvalidParameter(name + ": carrier must be finite");
}

SpinSystem SpinSystem::resonant(const ZfsParams& zfs, double rabi_mw1_hz, double rabi_mw2_hz,
                                double rate_mw1, double rate_mw2) {
  const auto [f_low, f_high] = transition_frequencies(zfs);
  SpinSystem sys;
  sys.zfs = zfs;
  sys.mw1 = {Channel::MW1, f_low, rabi_mw1_hz, rate_mw1};
  sys.mw2 = {Channel::MW2, f_high, rabi_mw2_hz, rate_mw2};
  sys.validate();
  return sys;
}

void SpinSystem::validate() const {
  zfs.validate();
  if (mw1.label != Channel::MW1 || mw2.label != Channel::MW2)
    throw InvalidParameter("channel calibrations are mislabelled");
  mw1.validate();
  mw2.validate();
}

} // namespace nvsim
