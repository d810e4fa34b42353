#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nvsim/calibration.hpp"
#include "nvsim/sequence.hpp"

// Text format (.seq), one event per line, '#' starts a comment:
//
//   LASER <duration>
//   WAIT <duration>
//   READOUT <duration>
//   <channel> <angle> [DUR <duration>] [PHASE <radians>]
//   <channel> DUR <duration> [PHASE <radians>]
//
//   channel  := MW1 | MW2
//   angle    := PI/2 | PI | 2PI | <float>PI
//   duration := <float><unit>, unit in {ns, us, ms, s}
//
// Keywords are case-sensitive. Durations are stored to the picosecond.

namespace nvsim {

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, std::size_t column, std::string message, std::string token);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }
  const std::string& token() const { return token_; }

private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
  std::string token_;
};

/// Throws ParseError (1-based line and column) on any grammar violation.
PulseSequence parse(std::string_view source, std::string name = {});

/// Exact inverse of parse on the event list.
std::string serialize(const PulseSequence& seq);

struct Violation {
  std::size_t event_index = 0;
  std::string message;
};

/// Returns an empty list when the sequence is acceptable. `tolerance` bounds
/// the mismatch between a pulse's flip angle and its explicit duration.
std::vector<Violation> validate(const PulseSequence& seq, const SpinSystem& system,
                                Duration tolerance = Duration{1000});

/// Replaces runs of consecutive pulses that share channel and phase by one
/// pulse carrying the summed duration (and summed angle, when all are
/// symbolic). Idempotent.
PulseSequence merge_adjacent(const PulseSequence& seq);

/// Fills in the duration of every symbolic pulse from its channel's Rabi
/// frequency. Already-resolved events are left untouched.
PulseSequence resolve(const PulseSequence& seq, const SpinSystem& system);

/// Formats an angle in units of pi the way the parser reads it back.
std::string format_angle(double angle_pi);
/// Formats a duration in ns with picosecond precision ("31.766ns").
std::string format_duration(Duration d);

} // namespace nvsim
