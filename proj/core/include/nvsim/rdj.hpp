#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "nvsim/pulse_engine.hpp"
#include "nvsim/readout.hpp"
#include "nvsim/sequence.hpp"

namespace nvsim {

/// Selects one of the four one-bit functions: f1 = 0, f2 = 1 (constant),
/// f3(z) = z, f4(z) = 1 - z (balanced).
class OracleId {
public:
  explicit OracleId(int index);
  int index() const { return index_; }
  bool is_constant() const { return index_ <= 2; }
  /// f(z) for z in {0, 1}.
  int evaluate(int z) const;

  static std::array<OracleId, 4> all();

  friend bool operator==(OracleId, OracleId) = default;

private:
  int index_;
};

enum class Classification { Constant, Balanced };
std::string_view to_string(Classification c);

struct RdjResult {
  int oracle = 0;
  double p0 = 0.0;     // population of |0> at readout
  double signal = 0.0; // normalised fluorescence
  Classification classification = Classification::Constant;
  std::optional<ShotSample> shots;
};

/// V_f = diag((-1)^f(0), (-1)^f(1)) on span{|0>, |-1>}.
Matrix2c oracle_matrix(OracleId id);

/// 2-pi pulse fragment realising V_f up to a global phase:
/// f1 -> nothing, f2 -> MW1 2PI, f3 -> MW1 2PI, MW2 2PI, f4 -> MW2 2PI.
std::vector<PulseEvent> oracle_sequence(OracleId id);

/// LASER 5us, WAIT 5us, MW1 PI/2, oracle, MW1 PI/2, READOUT, then
/// merge_adjacent (so f1 carries a single MW1 PI).
PulseSequence build_rdj_program(OracleId id, Duration readout_window = Duration{300'000});

inline constexpr double kDefaultThreshold = 0.5;

/// Constant iff signal < threshold.
Classification classify(double signal, double threshold = kDefaultThreshold);

struct RdjOptions {
  SimOptions sim;
  ReadoutConfig readout;
  double threshold = kDefaultThreshold;
  bool sample_shots = false;
  std::uint64_t seed = 0;
};

/// Runs the program through run_sequence and reads out the state captured
/// at READOUT. With sample_shots the classification uses the sampled signal.
RdjResult run_rdj(OracleId id, const SpinSystem& system, const RdjOptions& opts);

/// All four oracles, possibly concurrently; ordered by oracle index.
std::vector<RdjResult> run_rdj_all(const SpinSystem& system, const RdjOptions& opts);

/// Seed used for oracle `id` when a whole run is driven by one base seed.
std::uint64_t oracle_seed(std::uint64_t base_seed, OracleId id);

/// Ideal unitary of an oracle fragment (3x3, interaction picture).
Matrix3c fragment_unitary(const std::vector<PulseEvent>& fragment, const SpinSystem& system);

/// Equal R on both channels such that the mean predicted_visibility over
/// the four programs equals `target`. Bisection on R.
double calibrate_dephasing_rate(const SpinSystem& system, double target_contrast);

} // namespace nvsim
