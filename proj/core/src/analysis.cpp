#include "nvsim/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <mutex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <fftw3.h>

namespace nvsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_length(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size())
    throw AnalysisError("t and y differ in length");
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Indices into the parameter vector.
enum Param { kY0 = 0, kAmp, kRate, kOmega, kPhase, kNumParams };
using Params = std::array<double, kNumParams>;

// Model in scaled time tau = (t - origin)/scale: rate and omega are
// dimensionless there, which keeps the normal equations well conditioned.
struct ScaledProblem {
  std::vector<double> tau;
  std::span<const double> y;
  std::array<bool, kNumParams> active{};

  double model(const Params& p, double s) const {
    return p[kY0] + p[kAmp] * std::exp(-p[kRate] * s) * std::cos(p[kOmega] * s + p[kPhase]);
  }

  double cost(const Params& p, Eigen::VectorXd* residual = nullptr) const {
    double c = 0.0;
    if (residual)
      residual->resize(static_cast<Eigen::Index>(tau.size()));
    for (std::size_t i = 0; i < tau.size(); ++i) {
      const double r = model(p, tau[i]) - y[i];
      if (residual)
        (*residual)(static_cast<Eigen::Index>(i)) = r;
      c += r * r;
    }
    return 0.5 * c;
  }

  Eigen::MatrixXd jacobian(const Params& p) const {
    Eigen::MatrixXd j(static_cast<Eigen::Index>(tau.size()), kNumParams);
    for (std::size_t i = 0; i < tau.size(); ++i) {
      const double s = tau[i];
      const double env = std::exp(-p[kRate] * s);
      const double c = std::cos(p[kOmega] * s + p[kPhase]);
      const double sn = std::sin(p[kOmega] * s + p[kPhase]);
      const auto row = static_cast<Eigen::Index>(i);
      j(row, kY0) = 1.0;
      j(row, kAmp) = env * c;
      j(row, kRate) = -s * p[kAmp] * env * c;
      j(row, kOmega) = -s * p[kAmp] * env * sn;
      j(row, kPhase) = -p[kAmp] * env * sn;
    }
    return j;
  }
};

// Rough frequency from mean crossings, for records too short for the FFT.
double crossing_frequency(std::span<const double> t, std::span<const double> y, double y0) {
  int crossings = 0;
  for (std::size_t i = 1; i < y.size(); ++i)
    if ((y[i - 1] - y0) * (y[i] - y0) < 0.0)
      ++crossings;
  const double span = t.back() - t.front();
  return std::max(crossings, 1) / (2.0 * span);
}

// Slope of log|y - y0| at the local maxima of |y - y0|.
double envelope_rate(std::span<const double> t, std::span<const double> y, double y0) {
  std::vector<double> xs, ls;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    const double a = std::abs(y[i] - y0);
    if (a > 0.0 && a >= std::abs(y[i - 1] - y0) && a >= std::abs(y[i + 1] - y0)) {
      xs.push_back(t[i]);
      ls.push_back(std::log(a));
    }
  }
  if (xs.size() < 2)
    return 0.0;
  const double mx = mean_of(xs), ml = mean_of(ls);
  double sxx = 0.0, sxl = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxl += (xs[i] - mx) * (ls[i] - ml);
  }
  if (sxx <= 0.0)
    return 0.0;
  return std::max(0.0, -sxl / sxx);
}

} // namespace

double DampedSineFit::frequency_hz() const { return omega / kTwoPi; }

double DampedSineFit::operator()(double t) const {
  return y0 + amplitude * std::exp(-rate * t) * std::cos(omega * t + phase);
}

double fft_bin_width(std::span<const double> t) {
  if (t.size() < 2)
    throw AnalysisError("need at least two samples");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  return 1.0 / (static_cast<double>(t.size()) * dt);
}

double fft_rabi_frequency(std::span<const double> t, std::span<const double> y) {
  require_same_length(t, y);
  const std::size_t n = t.size();
  if (n < 16)
    throw AnalysisError("FFT needs at least 16 samples");
  const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
  if (!(dt > 0.0))
    throw AnalysisError("time axis must be increasing");
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6 * dt)
      throw AnalysisError("samples are not uniformly spaced");

  const double mu = mean_of(y);
  double scale = 0.0;
  for (double v : y)
    scale = std::max(scale, std::abs(v - mu));
  if (scale <= 1e-12 * std::max(1.0, std::abs(mu)))
    throw AnalysisError("no dominant frequency");

  const std::size_t m = 8 * n;
  const std::size_t bins = m / 2 + 1;
  std::vector<double> in(m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    in[i] = y[i] - mu;
  std::vector<double> mag(bins);
  {
    // FFTW planning is not thread-safe; execution on private buffers is.
    static std::mutex planner;
    fftw_complex* out = fftw_alloc_complex(bins);
    fftw_plan plan;
    {
      std::lock_guard lock(planner);
      // FFTW_ESTIMATE leaves the input untouched and plans deterministically.
      plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.data(), out, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    for (std::size_t k = 0; k < bins; ++k)
      mag[k] = std::hypot(out[k][0], out[k][1]);
    {
      std::lock_guard lock(planner);
      fftw_destroy_plan(plan);
    }
    fftw_free(out);
  }

  // Walk down the DC lobe before looking for the peak.
  std::size_t start = 1;
  while (start + 1 < bins && mag[start + 1] < mag[start])
    ++start;
  std::size_t peak = start;
  for (std::size_t k = start; k < bins; ++k)
    if (mag[k] > mag[peak])
      peak = k;

  std::vector<double> sorted(mag.begin() + 1, mag.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                   sorted.end());
  const double median = sorted[sorted.size() / 2];
  if (peak == 0 || peak + 1 >= bins || !(mag[peak] >= 3.0 * median))
    throw AnalysisError("no dominant frequency");

  double offset = 0.0;
  const double a = std::log(mag[peak - 1]);
  const double b = std::log(mag[peak]);
  const double c = std::log(mag[peak + 1]);
  if (const double denom = a - 2.0 * b + c; std::isfinite(denom) && denom < 0.0)
    offset = 0.5 * (a - c) / denom;
  return (static_cast<double>(peak) + offset) / (static_cast<double>(m) * dt);
}

DampedSineFit fit_damped_sine(std::span<const double> t, std::span<const double> y,
                              const FitOptions& opts) {
  require_same_length(t, y);
  if (t.size() < 8)
    throw AnalysisError("fit needs at least 8 samples");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1]))
      throw AnalysisError("t must be strictly increasing");

  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  const double y_mean = mean_of(y);
  if (*ymax - *ymin <= 1e-12 * std::max(1.0, std::abs(y_mean)))
    throw AnalysisError("no oscillation detected");

  const double origin = opts.origin_at_first_sample ? t.front() : 0.0;
  const double tscale = t.back() - origin > 0.0 ? t.back() - origin : t.back() - t.front();

  // Seed in physical units.
  DampedSineFit seed;
  if (opts.init) {
    seed = *opts.init;
  } else {
    seed.y0 = opts.mode == FitMode::Normalized ? 0.5 : y_mean;
    double freq = 0.0;
    if (t.size() >= 16) {
      try {
        freq = fft_rabi_frequency(t, y);
      } catch (const AnalysisError&) {
        freq = 0.0;
      }
    }
    if (!(freq > 0.0))
      freq = crossing_frequency(t, y, seed.y0);
    seed.omega = kTwoPi * freq;
    seed.rate = envelope_rate(t, y, seed.y0);
    double amp = 0.5 * (*ymax - *ymin);
    // Pick the sign that matches the first sample.
    const double c0 = std::cos(seed.omega * (t.front() - origin));
    if ((y.front() - seed.y0) * c0 < 0.0)
      amp = -amp;
    seed.amplitude = amp;
  }
  if (opts.mode == FitMode::Normalized) {
    seed.y0 = 0.5;
    seed.amplitude = 0.5;
  }
  if (!opts.free_phase)
    seed.phase = 0.0;

  ScaledProblem prob;
  prob.y = y;
  prob.tau.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    prob.tau[i] = (t[i] - origin) / tscale;
  prob.active = {opts.mode == FitMode::Free, opts.mode == FitMode::Free, true, true,
                 opts.free_phase};

  Params p{seed.y0, seed.amplitude, std::max(0.0, seed.rate) * tscale, seed.omega * tscale,
           seed.phase};

  Eigen::VectorXd res;
  double cost = prob.cost(p, &res);
  double lambda = 1e-3;
  bool converged = false;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const Eigen::MatrixXd jac = prob.jacobian(p);
    const Eigen::VectorXd grad = jac.transpose() * res;

    // Parameters taking part in this step: active ones, except R when it
    // sits on its lower bound and the gradient pushes it further down.
    std::vector<int> free;
    double gnorm = 0.0;
    for (int k = 0; k < kNumParams; ++k) {
      if (!prob.active[k])
        continue;
      if (k == kRate && p[kRate] <= 0.0 && grad(k) > 0.0)
        continue;
      free.push_back(k);
      gnorm = std::max(gnorm, std::abs(grad(k)));
    }
    if (gnorm < opts.gradient_tolerance) {
      converged = true;
      break;
    }

    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd jtj(nf, nf);
    Eigen::VectorXd g(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      g(a) = grad(free[a]);
      for (Eigen::Index b = 0; b < nf; ++b)
        jtj(a, b) = jac.col(free[a]).dot(jac.col(free[b]));
    }

    bool accepted = false;
    while (lambda < 1e20) {
      Eigen::MatrixXd lhs = jtj;
      for (Eigen::Index a = 0; a < nf; ++a)
        lhs(a, a) += lambda * std::max(jtj(a, a), 1e-12);
      const Eigen::VectorXd step = lhs.ldlt().solve(-g);
      Params trial = p;
      for (Eigen::Index a = 0; a < nf; ++a)
        trial[free[a]] += step(a);
      trial[kRate] = std::max(0.0, trial[kRate]);
      Eigen::VectorXd trial_res;
      const double trial_cost = prob.cost(trial, &trial_res);
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        const bool stalled = cost - trial_cost <= 1e-16 * cost;
        p = trial;
        res = trial_res;
        cost = trial_cost;
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        if (stalled && cost == 0.0)
          converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted || converged)
      break;
  }

  DampedSineFit fit;
  fit.y0 = p[kY0];
  fit.amplitude = p[kAmp];
  fit.rate = p[kRate] / tscale;
  fit.omega = p[kOmega] / tscale;
  fit.phase = p[kPhase];
  fit.iterations = it;
  if (!converged) {
    // A step that cannot lower the cost any further at a vanishing gradient
    // is still a minimum.
    const Eigen::VectorXd grad = prob.jacobian(p).transpose() * res;
    double gnorm = 0.0;
    for (int k = 0; k < kNumParams; ++k)
      if (prob.active[k] && !(k == kRate && p[kRate] <= 0.0 && grad(k) > 0.0))
        gnorm = std::max(gnorm, std::abs(grad(k)));
    converged = gnorm < opts.gradient_tolerance;
  }
  fit.converged = converged;
  if (fit.omega < 0.0) {
    fit.omega = -fit.omega;
    fit.phase = -fit.phase;
  }
  fit.residual_rms = std::sqrt(2.0 * cost / static_cast<double>(t.size()));
  return fit;
}

double contrast(std::span<const double> signals_constant, std::span<const double> signals_balanced) {
  if (signals_constant.empty() || signals_balanced.empty())
    throw AnalysisError("contrast needs non-empty signal lists");
  return mean_of(signals_balanced) - mean_of(signals_constant);
}

double pi_time_from_curve(std::span<const double> t, std::span<const double> y) {
  require_same_length(t, y);
  if (t.empty())
    throw AnalysisError("empty curve");
  const auto it = std::min_element(y.begin(), y.end());
  return t[static_cast<std::size_t>(it - y.begin())];
}

} // namespace nvsim
