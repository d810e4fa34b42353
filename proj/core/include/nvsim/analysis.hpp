#pragma once

#include <optional>
#include <span>
#include <stdexcept>

namespace nvsim {

class AnalysisError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// y = y0 + A exp(-R t) cos(omega t + phase). `phase` stays 0 unless the fit
/// runs in free-phase mode.
struct DampedSineFit {
  double y0 = 0.0;
  double amplitude = 0.0;
  double rate = 0.0;  // R, 1/s
  double omega = 0.0; // rad/s
  double phase = 0.0; // rad
  double residual_rms = 0.0;
  bool converged = false;
  int iterations = 0;

  double frequency_hz() const;
  double operator()(double t) const;
};

enum class FitMode {
  Free,       // y0, A, R, omega
  Normalized, // y0 = A = 0.5 held fixed; R and omega only
};

struct FitOptions {
  FitMode mode = FitMode::Free;
  bool free_phase = false;
  // Measure time from the first sample, so the cosine origin sits there.
  // The returned y0, A, phase then refer to that shifted clock.
  bool origin_at_first_sample = false;
  int max_iterations = 200;
  double gradient_tolerance = 1e-10;
  std::optional<DampedSineFit> init;
};

/// Levenberg-Marquardt least squares with an analytic Jacobian. Needs at
/// least 8 samples with strictly increasing t. Unseeded parameters come from
/// the data: omega from fft_rabi_frequency, y0 from the mean, A from half the
/// peak-to-peak, R from a log-envelope regression. Throws AnalysisError
/// ("no oscillation detected") on constant input; returns converged = false
/// with the best parameters when the iteration budget runs out.
DampedSineFit fit_damped_sine(std::span<const double> t, std::span<const double> y,
                              const FitOptions& opts = {});

/// Dominant oscillation frequency (Hz) of uniformly sampled data: mean
/// removed, zero-padded x8, peak above the DC lobe refined by a parabola
/// through the log magnitudes. Throws AnalysisError("no dominant frequency")
/// when the peak is below 3x the median magnitude.
double fft_rabi_frequency(std::span<const double> t, std::span<const double> y);

/// Unpadded DFT bin width 1/(N dt) for the same sampling.
double fft_bin_width(std::span<const double> t);

/// mean(balanced) - mean(constant) on normalised signals.
double contrast(std::span<const double> signals_constant, std::span<const double> signals_balanced);

/// Time of the smallest signal sample; the pi-pulse length of a nutation
/// curve recorded from |0>.
double pi_time_from_curve(std::span<const double> t, std::span<const double> y);

} // namespace nvsim
