#include "nvsim/readout.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace nvsim {

void ReadoutConfig::validate() const {
  if (!(init_fidelity > 0.0 && init_fidelity <= 1.0))
    throw InvalidParameter("init_fidelity must lie in (0, 1]");
  if (!(rate_dark_cps >= 0.0))
    throw InvalidParameter("rate_dark_cps must be non-negative");
  if (!(rate_bright_cps > rate_dark_cps))
    throw InvalidParameter("rate_bright_cps must exceed rate_dark_cps");
  if (!(window_s > 0.0))
    throw InvalidParameter("readout window must be positive");
  if (n_averages == 0)
    throw InvalidParameter("n_averages must be at least 1");
}

ReadoutConfig ReadoutConfig::ideal() const {
  ReadoutConfig cfg = *this;
  cfg.init_fidelity = 1.0;
  return cfg;
}

DensityMatrix3 initialize_state(const ReadoutConfig& cfg) {
  cfg.validate();
  const double p = cfg.init_fidelity;
  Matrix3c rho = Matrix3c::Zero();
  rho(index_of(Level::Zero), index_of(Level::Zero)) = p;
  rho(index_of(Level::Plus), index_of(Level::Plus)) = 0.5 * (1.0 - p);
  rho(index_of(Level::Minus), index_of(Level::Minus)) = 0.5 * (1.0 - p);
  return DensityMatrix3(rho);
}

Fluorescence fluorescence_signal(const DensityMatrix3& rho, const ReadoutConfig& cfg) {
  const double p0 = rho.population(Level::Zero);
  Fluorescence f;
  f.raw_rate_cps = p0 * cfg.rate_bright_cps + (1.0 - p0) * cfg.rate_dark_cps;
  f.normalized = p0;
  return f;
}

namespace {

double expected_counts(double normalized, const ReadoutConfig& cfg) {
  const double n = static_cast<double>(cfg.n_averages);
  return n * cfg.window_s *
         (cfg.rate_dark_cps + normalized * (cfg.rate_bright_cps - cfg.rate_dark_cps));
}

double counts_to_normalized(double counts, const ReadoutConfig& cfg) {
  const double n = static_cast<double>(cfg.n_averages);
  const double rate = counts / (n * cfg.window_s);
  return (rate - cfg.rate_dark_cps) / (cfg.rate_bright_cps - cfg.rate_dark_cps);
}

} // namespace

ShotSample simulate_shots(double normalized, const ReadoutConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (!(normalized >= 0.0 && normalized <= 1.0))
    throw InvalidParameter("normalized signal must lie in [0, 1]");
  const double mean = expected_counts(normalized, cfg);
  std::mt19937_64 rng(seed);
  ShotSample s;
  if (mean > 0.0) {
    std::poisson_distribution<std::uint64_t> dist(mean);
    s.counts = dist(rng);
  }
  s.normalized = counts_to_normalized(static_cast<double>(s.counts), cfg);
  return s;
}

double shot_noise_sigma(double normalized, const ReadoutConfig& cfg) {
  const double n = static_cast<double>(cfg.n_averages);
  return std::sqrt(expected_counts(normalized, cfg)) /
         (n * cfg.window_s * (cfg.rate_bright_cps - cfg.rate_dark_cps));
}

Compensated compensate_dephasing(double raw_signal, double visibility) {
  if (!(visibility > 0.0))
    throw InvalidParameter("visibility must be positive");
  const double v = 0.5 + (raw_signal - 0.5) / visibility;
  if (v < 0.0)
    return {0.0, true};
  if (v > 1.0)
    return {1.0, true};
  return {v, false};
}

double predicted_visibility(const PulseSequence& program, const SpinSystem& system) {
  double exponent = 0.0;
  for (const auto& ev : program.events) {
    if (!ev.is_pulse())
      continue;
    const auto& cal = system.channel(ev.channel);
    double t = 0.0;
    if (ev.duration) {
      t = to_seconds(*ev.duration);
    } else {
      const double angle = ev.angle_pi.value_or(0.0);
      cal.duration_for(angle); // rejects bad angles and Rabi frequencies
      t = angle / (2.0 * cal.rabi_hz);
    }
    exponent += cal.dephasing_rate * t;
  }
  return std::exp(-exponent);
}

double predicted_contrast(std::span<const PulseSequence> programs, const SpinSystem& system) {
  if (programs.empty())
    throw std::invalid_argument("predicted_contrast needs at least one program");
  double sum = 0.0;
  for (const auto& p : programs)
    sum += predicted_visibility(p, system);
  return sum / static_cast<double>(programs.size());
}

} // namespace nvsim
