#include "nvsim/pulse_dsl.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <system_error>

namespace nvsim {

ParseError::ParseError(std::size_t line, std::size_t column, std::string message,
                       std::string token)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message + (token.empty() ? "" : " '" + token + "'")),
      line_(line), column_(column), message_(std::move(message)), token_(std::move(token)) {}

namespace {

struct Token {
  std::string_view text;
  std::size_t column; // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
      ++i;
    if (i >= line.size())
      break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t')
      ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  if (s.empty())
    return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

class LineParser {
public:
  LineParser(std::size_t line_no, std::string_view line)
      : line_no_(line_no), end_column_(line.size() + 1), tokens_(tokenize(line)) {}

  bool blank() const { return tokens_.empty(); }

  PulseEvent parse_event() {
    const Token head = next("event keyword");
    if (head.text == "LASER")
      return finish(PulseEvent::laser(duration_arg()));
    if (head.text == "WAIT")
      return finish(PulseEvent::wait(duration_arg()));
    if (head.text == "READOUT")
      return finish(PulseEvent::readout(duration_arg()));
    if (head.text == "MW1" || head.text == "MW2")
      return pulse(head.text == "MW1" ? Channel::MW1 : Channel::MW2);
    if (head.text.size() >= 2 && head.text.substr(0, 2) == "MW")
      fail(head, "unknown channel");
    fail(head, "unknown keyword");
  }

private:
  [[noreturn]] void fail(const Token& tok, const std::string& message) const {
    throw ParseError(line_no_, tok.column, message, std::string(tok.text));
  }

  Token next(const char* what) {
    if (pos_ >= tokens_.size())
      throw ParseError(line_no_, end_column_, std::string("missing ") + what, "");
    return tokens_[pos_++];
  }

  bool peek_is(std::string_view text) const {
    return pos_ < tokens_.size() && tokens_[pos_].text == text;
  }

  PulseEvent finish(PulseEvent ev) {
    if (pos_ < tokens_.size())
      fail(tokens_[pos_], "unexpected token");
    return ev;
  }

  Duration duration_arg() {
    const Token tok = next("duration");
    static constexpr std::pair<std::string_view, double> kUnits[] = {
        {"ns", 1e3}, {"us", 1e6}, {"ms", 1e9}, {"s", 1e12}};
    for (const auto& [suffix, ps_per_unit] : kUnits) {
      if (tok.text.size() <= suffix.size() ||
          tok.text.substr(tok.text.size() - suffix.size()) != suffix)
        continue;
      const auto value = parse_number(tok.text.substr(0, tok.text.size() - suffix.size()));
      if (!value)
        fail(tok, "malformed duration");
      if (*value < 0.0)
        fail(tok, "negative duration");
      const double ps = std::round(*value * ps_per_unit);
      if (!(ps < 9.0e18))
        fail(tok, "duration out of range");
      return Duration{static_cast<std::int64_t>(ps)};
    }
    fail(tok, "malformed duration");
  }

  double angle_arg(const Token& tok) {
    if (tok.text == "PI/2")
      return 0.5;
    const std::string_view t = tok.text;
    if (t.size() < 2 || t.substr(t.size() - 2) != "PI")
      fail(tok, "malformed angle");
    const std::string_view factor = t.substr(0, t.size() - 2);
    if (factor.empty())
      return 1.0;
    const auto value = parse_number(factor);
    if (!value)
      fail(tok, "malformed angle");
    if (*value < 0.0)
      fail(tok, "negative angle");
    return *value;
  }

  PulseEvent pulse(Channel ch) {
    PulseEvent ev;
    ev.kind = EventKind::MwPulse;
    ev.channel = ch;
    const Token first = next("flip angle or DUR");
    if (first.text == "DUR") {
      ev.duration = duration_arg();
    } else {
      ev.angle_pi = angle_arg(first);
      if (peek_is("DUR")) {
        ++pos_;
        ev.duration = duration_arg();
      }
    }
    if (peek_is("PHASE")) {
      ++pos_;
      const Token tok = next("phase");
      const auto value = parse_number(tok.text);
      if (!value)
        fail(tok, "malformed phase");
      ev.phase = *value;
    }
    return finish(ev);
  }

  std::size_t line_no_;
  std::size_t end_column_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{})
    throw std::logic_error("number formatting failed");
  return std::string(buf, ptr);
}

bool mergeable(const PulseEvent& a, const PulseEvent& b) {
  if (!a.is_pulse() || !b.is_pulse() || a.channel != b.channel || a.phase != b.phase)
    return false;
  if (a.duration.has_value() != b.duration.has_value())
    return false;
  return a.duration.has_value() || (a.angle_pi && b.angle_pi);
}

} // namespace

PulseSequence parse(std::string_view source, std::string name) {
  PulseSequence seq;
  seq.name = std::move(name);
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= source.size()) {
    std::size_t stop = source.find('\n', start);
    if (stop == std::string_view::npos)
      stop = source.size();
    std::string_view line = source.substr(start, stop - start);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    LineParser lp(line_no, line);
    if (!lp.blank())
      seq.events.push_back(lp.parse_event());
    if (stop == source.size())
      break;
    start = stop + 1;
  }
  return seq;
}

std::string format_angle(double angle_pi) {
  if (angle_pi == 0.5)
    return "PI/2";
  if (angle_pi == 1.0)
    return "PI";
  return shortest(angle_pi) + "PI";
}

std::string format_duration(Duration d) {
  const std::int64_t ps = d.count();
  const std::int64_t mag = std::llabs(ps);
  std::string out = (ps < 0 ? "-" : "") + std::to_string(mag / 1000);
  if (const std::int64_t frac = mag % 1000; frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 3 - digits.size(), '0');
    while (digits.back() == '0')
      digits.pop_back();
    out += "." + digits;
  }
  return out + "ns";
}

std::string serialize(const PulseSequence& seq) {
  std::string out;
  for (const auto& ev : seq.events) {
    switch (ev.kind) {
    case EventKind::Laser:
    case EventKind::Wait:
    case EventKind::Readout:
      if (!ev.duration)
        throw std::logic_error("timed event without a duration");
      out += std::string(to_string(ev.kind)) + " " + format_duration(*ev.duration);
      break;
    case EventKind::MwPulse:
      out += to_string(ev.channel);
      if (ev.angle_pi)
        out += " " + format_angle(*ev.angle_pi);
      if (ev.duration)
        out += " DUR " + format_duration(*ev.duration);
      if (!ev.angle_pi && !ev.duration)
        throw std::logic_error("pulse has neither angle nor duration");
      if (ev.phase != 0.0)
        out += " PHASE " + shortest(ev.phase);
      break;
    }
    out += '\n';
  }
  return out;
}

std::vector<Violation> validate(const PulseSequence& seq, const SpinSystem& system,
                                Duration tolerance) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < seq.events.size(); ++i) {
    const PulseEvent& ev = seq.events[i];
    if (ev.duration && *ev.duration < Duration{0})
      out.push_back({i, "negative duration"});

    if (ev.is_pulse()) {
      if (!ev.duration && !ev.angle_pi) {
        out.push_back({i, "pulse has neither a flip angle nor a duration"});
      } else if (ev.angle_pi) {
        const ChannelCalibration& cal = system.channel(ev.channel);
        if (!(cal.rabi_hz > 0.0)) {
          out.push_back({i, std::string(to_string(ev.channel)) + " has no usable Rabi frequency"});
        } else if (ev.duration) {
          const Duration expected = cal.duration_for(*ev.angle_pi);
          if (std::llabs((*ev.duration - expected).count()) > tolerance.count())
            out.push_back({i, "flip angle " + format_angle(*ev.angle_pi) + " implies " +
                                  format_duration(expected) + " but duration is " +
                                  format_duration(*ev.duration)});
        }
      }
    } else if (!ev.duration) {
      out.push_back({i, std::string(to_string(ev.kind)) + " without a duration"});
    }

    // READOUT needs the laser on: either directly after a LASER event, or as
    // the final event where it switches the laser on itself. Events are
    // strictly sequential, so a pulse can never overlap a LASER window.
    if (ev.kind == EventKind::Readout) {
      const bool after_laser = i > 0 && seq.events[i - 1].kind == EventKind::Laser;
      const bool last = i + 1 == seq.events.size();
      if (!after_laser && !last)
        out.push_back({i, "READOUT is neither preceded by LASER nor at the end of the sequence"});
    }
  }
  return out;
}

PulseSequence merge_adjacent(const PulseSequence& seq) {
  PulseSequence out;
  out.name = seq.name;
  for (const auto& ev : seq.events) {
    if (!out.events.empty() && mergeable(out.events.back(), ev)) {
      PulseEvent& prev = out.events.back();
      if (prev.duration)
        prev.duration = *prev.duration + *ev.duration;
      if (prev.angle_pi && ev.angle_pi)
        prev.angle_pi = *prev.angle_pi + *ev.angle_pi;
      else
        prev.angle_pi.reset();
      continue;
    }
    out.events.push_back(ev);
  }
  return out;
}

PulseSequence resolve(const PulseSequence& seq, const SpinSystem& system) {
  PulseSequence out = seq;
  for (auto& ev : out.events)
    if (ev.is_pulse() && !ev.duration && ev.angle_pi)
      ev.duration = system.channel(ev.channel).duration_for(*ev.angle_pi);
  return out;
}

} // namespace nvsim
