#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "nvsim/calibration.hpp"
#include "nvsim/pulse_engine.hpp"
#include "nvsim/readout.hpp"

namespace nvsim {

inline constexpr double kDefaultD = 2.8449e9;
inline constexpr double kDefaultE = 19.5e6;
inline constexpr double kDefaultRabiMw1 = 7.87e6;
inline constexpr double kDefaultRabiMw2 = 4.26e6;
/// Mean RDJ contrast the default dephasing rates are calibrated to.
inline constexpr double kDefaultTargetContrast = 0.596;

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Everything a run needs. Carriers default to the two zero-field lines;
/// an off-resonant carrier is only accepted with allow_detuning set.
struct RunConfig {
  SpinSystem system;
  SimOptions sim;
  ReadoutConfig readout;
  std::uint64_t seed = 0;
  bool allow_detuning = false;

  /// Defaults from the reference experiment. The equal MW1/MW2 dephasing rate is obtained by
  /// calibrate_dephasing_rate against kDefaultTargetContrast.
  static RunConfig defaults();
  void validate() const;
};

/// JSON object with unit-suffixed keys; missing keys keep their defaults,
/// unknown keys are rejected.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string dump_config(const RunConfig& cfg);

} // namespace nvsim
