#include "nvsim/sequence.hpp"

#include <cmath>
#include <stdexcept>

namespace nvsim {

Duration from_seconds(double seconds) {
  if (!std::isfinite(seconds))
    throw std::invalid_argument("duration must be finite");
  const double ps = std::round(seconds * 1e12);
  if (std::abs(ps) > 9.0e18)
    throw std::out_of_range("duration exceeds the representable range");
  return Duration{static_cast<std::int64_t>(ps)};
}

std::string_view to_string(Channel ch) {
  return ch == Channel::MW1 ? "MW1" : "MW2";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
  case EventKind::MwPulse: return "MW";
  case EventKind::Wait: return "WAIT";
  case EventKind::Laser: return "LASER";
  case EventKind::Readout: return "READOUT";
  }
  return "?";
}

PulseEvent PulseEvent::laser(Duration d) {
  PulseEvent ev;
  ev.kind = EventKind::Laser;
  ev.duration = d;
  return ev;
}

PulseEvent PulseEvent::wait(Duration d) {
  PulseEvent ev;
  ev.kind = EventKind::Wait;
  ev.duration = d;
  return ev;
}

PulseEvent PulseEvent::readout(Duration d) {
  PulseEvent ev;
  ev.kind = EventKind::Readout;
  ev.duration = d;
  return ev;
}

PulseEvent PulseEvent::pulse(Channel ch, double angle_pi, double phase) {
  PulseEvent ev;
  ev.kind = EventKind::MwPulse;
  ev.channel = ch;
  ev.angle_pi = angle_pi;
  ev.phase = phase;
  return ev;
}

PulseEvent PulseEvent::pulse_for(Channel ch, Duration d, double phase) {
  PulseEvent ev;
  ev.kind = EventKind::MwPulse;
  ev.channel = ch;
  ev.duration = d;
  ev.phase = phase;
  return ev;
}

Duration PulseSequence::total_duration() const {
  Duration total{0};
  for (const auto& ev : events) {
    if (!ev.duration)
      throw std::logic_error("sequence contains an unresolved pulse");
    total += *ev.duration;
  }
  return total;
}

Duration PulseSequence::microwave_duration(Channel ch) const {
  Duration total{0};
  for (const auto& ev : events)
    if (ev.is_pulse() && ev.channel == ch && ev.duration)
      total += *ev.duration;
  return total;
}

Duration PulseSequence::microwave_duration() const {
  return microwave_duration(Channel::MW1) + microwave_duration(Channel::MW2);
}

std::vector<PulseEvent> PulseSequence::microwave_events() const {
  std::vector<PulseEvent> out;
  for (const auto& ev : events)
    if (ev.is_pulse())
      out.push_back(ev);
  return out;
}

} // namespace nvsim
