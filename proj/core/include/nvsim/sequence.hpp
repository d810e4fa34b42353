#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nvsim {

/// Event durations are integral picoseconds so that sums, merges and text
/// round-trips are exact.
using Duration = std::chrono::duration<std::int64_t, std::pico>;

inline double to_seconds(Duration d) {
  return std::chrono::duration<double>(d).count();
}

/// Rounds to the nearest picosecond.
Duration from_seconds(double seconds);

enum class Channel { MW1, MW2 };
enum class EventKind { MwPulse, Wait, Laser, Readout };

std::string_view to_string(Channel ch);
std::string_view to_string(EventKind kind);

struct PulseEvent {
  EventKind kind = EventKind::Wait;
  Channel channel = Channel::MW1; // meaningful for MwPulse only
  // A microwave pulse given only as a flip angle has no duration until it is
  // resolved against a channel calibration.
  std::optional<Duration> duration;
  // Nominal flip angle in units of pi (0.5 for PI/2, 2 for 2PI).
  std::optional<double> angle_pi;
  double phase = 0.0; // drive phase, radians

  bool is_pulse() const { return kind == EventKind::MwPulse; }
  bool resolved() const { return duration.has_value(); }

  friend bool operator==(const PulseEvent&, const PulseEvent&) = default;

  static PulseEvent laser(Duration d);
  static PulseEvent wait(Duration d);
  static PulseEvent readout(Duration d);
  static PulseEvent pulse(Channel ch, double angle_pi, double phase = 0.0);
  static PulseEvent pulse_for(Channel ch, Duration d, double phase = 0.0);
};

struct PulseSequence {
  std::string name;
  std::vector<PulseEvent> events;

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }

  /// Sum of all durations; throws std::logic_error on unresolved pulses.
  Duration total_duration() const;
  /// Summed duration of resolved microwave pulses on `ch`.
  Duration microwave_duration(Channel ch) const;
  Duration microwave_duration() const;
  std::vector<PulseEvent> microwave_events() const;
};

} // namespace nvsim
