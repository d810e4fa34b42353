#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nvsim/analysis.hpp"
#include "nvsim/pulse_engine.hpp"

using namespace nvsim;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Record {
  std::vector<double> t, y;
};

Record synth(double y0, double a, double r, double f, std::size_t n, double t_max,
             double noise = 0.0, std::uint64_t seed = 0) {
  Record rec;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise > 0.0 ? noise : 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t_max * static_cast<double>(i) / static_cast<double>(n - 1);
    rec.t.push_back(t);
    rec.y.push_back(y0 + a * std::exp(-r * t) * std::cos(kTwoPi * f * t) +
                    (noise > 0.0 ? g(rng) : 0.0));
  }
  return rec;
}

} // namespace

TEST(Fit, NoiselessRecovery) {
  const auto rec = synth(0.5, 0.5, 2e6, 7.87e6, 200, 1e-6);
  const auto fit = fit_damped_sine(rec.t, rec.y);
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.y0, 0.5, 0.5e-6);
  EXPECT_NEAR(fit.amplitude, 0.5, 0.5e-6);
  EXPECT_NEAR(fit.rate, 2e6, 2.0);
  EXPECT_NEAR(fit.omega, kTwoPi * 7.87e6, kTwoPi * 7.87);
  EXPECT_LT(fit.residual_rms, 1e-9);
  EXPECT_LE(fit.iterations, 200);
}

TEST(Fit, NormalizedModeFitsOnlyRateAndOmega) {
  const auto rec = synth(0.5, 0.5, 1.3e6, 4.26e6, 200, 1e-6);
  FitOptions opts;
  opts.mode = FitMode::Normalized;
  const auto fit = fit_damped_sine(rec.t, rec.y, opts);
  EXPECT_TRUE(fit.converged);
  EXPECT_EQ(fit.y0, 0.5);
  EXPECT_EQ(fit.amplitude, 0.5);
  EXPECT_NEAR(fit.rate / 1.3e6, 1.0, 1e-6);
  EXPECT_NEAR(fit.frequency_hz() / 4.26e6, 1.0, 1e-6);
}

TEST(Fit, UndampedCosine) {
  const auto rec = synth(0.5, 0.5, 0.0, 7.87e6, 200, 1e-6);
  const auto fit = fit_damped_sine(rec.t, rec.y);
  EXPECT_LE(fit.rate, 1e-3 * fit.frequency_hz());
  EXPECT_GE(fit.rate, 0.0);
}

TEST(Fit, FreePhase) {
  Record rec;
  for (int i = 0; i < 150; ++i) {
    const double t = i * 4e-9;
    rec.t.push_back(t);
    rec.y.push_back(0.4 + 0.3 * std::exp(-1e6 * t) * std::cos(kTwoPi * 5e6 * t + 0.6));
  }
  FitOptions opts;
  opts.free_phase = true;
  const auto fit = fit_damped_sine(rec.t, rec.y, opts);
  EXPECT_NEAR(fit.phase, 0.6, 1e-6);
  EXPECT_NEAR(fit.frequency_hz(), 5e6, 1.0);
}

TEST(Fit, ExplicitInitialGuess) {
  const auto rec = synth(0.5, 0.5, 2e6, 7.87e6, 200, 1e-6);
  FitOptions opts;
  DampedSineFit init;
  init.y0 = 0.45;
  init.amplitude = 0.55;
  init.rate = 1.5e6;
  init.omega = kTwoPi * 7.8e6;
  opts.init = init;
  const auto fit = fit_damped_sine(rec.t, rec.y, opts);
  EXPECT_NEAR(fit.frequency_hz() / 7.87e6, 1.0, 1e-6);
}

TEST(Fit, Preconditions) {
  const std::vector<double> t{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const std::vector<double> flat(10, 0.3);
  try {
    fit_damped_sine(t, flat);
    FAIL();
  } catch (const AnalysisError& e) {
    EXPECT_STREQ(e.what(), "no oscillation detected");
  }
  EXPECT_THROW(fit_damped_sine(std::vector<double>{0, 1, 2}, std::vector<double>{0, 1, 0}),
               AnalysisError);
  std::vector<double> bad_t = t;
  bad_t[4] = bad_t[3];
  EXPECT_THROW(fit_damped_sine(bad_t, std::vector<double>{0, 1, 0, 1, 0, 1, 0, 1, 0, 1}),
               AnalysisError);
}

TEST(Fit, IterationBudgetExhaustion) {
  const auto rec = synth(0.5, 0.5, 2e6, 7.87e6, 200, 1e-6, 0.05, 1);
  FitOptions opts;
  opts.max_iterations = 1;
  opts.gradient_tolerance = 0.0;
  const auto fit = fit_damped_sine(rec.t, rec.y, opts);
  EXPECT_FALSE(fit.converged);
  EXPECT_TRUE(std::isfinite(fit.omega));
}

TEST(Fit, NoisyRandomDraws) {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> f(1e6, 20e6), r(0.0, 5e6);
  int good = 0;
  for (int n = 0; n < 100; ++n) {
    const double freq = f(rng), rate = r(rng);
    const auto rec = synth(0.5, 0.5, rate, freq, 200, 1e-6, 0.02, 1000 + n);
    const auto fit = fit_damped_sine(rec.t, rec.y);
    const bool omega_ok = std::abs(fit.frequency_hz() / freq - 1.0) < 0.005;
    // 10% of R, with a floor for nearly undamped draws where a relative
    // criterion is meaningless.
    const bool rate_ok = std::abs(fit.rate - rate) < 0.1 * std::max(rate, 1e6);
    good += omega_ok && rate_ok;
  }
  EXPECT_GE(good, 95);
}

TEST(Fit, TranslationCovariance) {
  const auto rec = synth(0.5, 0.5, 2e6, 7.87e6, 200, 1e-6, 0.01, 9);
  FitOptions opts;
  opts.origin_at_first_sample = true;
  const auto base = fit_damped_sine(rec.t, rec.y, opts);
  for (double shift : {1e-7, 3.3e-6, 1e-3}) {
    std::vector<double> ts = rec.t;
    for (auto& v : ts)
      v += shift;
    const auto moved = fit_damped_sine(ts, rec.y, opts);
    EXPECT_NEAR(moved.omega / base.omega, 1.0, 1e-9);
    EXPECT_NEAR(moved.rate / base.rate, 1.0, 1e-9);
  }
}

TEST(Fft, SyntheticFrequencies) {
  for (double f : {7.87e6, 4.26e6}) {
    const auto rec = synth(0.0, 1.0, 0.0, f, 100, 99 * 10e-9);
    EXPECT_NEAR(fft_rabi_frequency(rec.t, rec.y), f, 0.02e6);
  }
}

TEST(Fft, ConstantSignalHasNoPeak) {
  std::vector<double> t, y;
  for (int i = 0; i < 64; ++i) {
    t.push_back(i * 1e-8);
    y.push_back(0.7);
  }
  try {
    fft_rabi_frequency(t, y);
    FAIL();
  } catch (const AnalysisError& e) {
    EXPECT_STREQ(e.what(), "no dominant frequency");
  }
}

TEST(Fft, Preconditions) {
  const auto rec = synth(0.0, 1.0, 0.0, 5e6, 10, 1e-6);
  EXPECT_THROW(fft_rabi_frequency(rec.t, rec.y), AnalysisError);
  auto jit = synth(0.0, 1.0, 0.0, 5e6, 64, 1e-6);
  jit.t[10] += 1e-10;
  EXPECT_THROW(fft_rabi_frequency(jit.t, jit.y), AnalysisError);
}

TEST(Fft, AgreesWithFitOnNutationCurves) {
  const auto sys = SpinSystem::resonant({2.8449e9, 19.5e6}, 7.87e6, 4.26e6, 2.3e6, 2.3e6);
  for (auto ch : {Channel::MW1, Channel::MW2})
    for (auto model : {DephasingModel::None, DephasingModel::Lindblad}) {
      SimOptions opts;
      opts.dephasing = model;
      const auto curve = nutation_curve(sys, ch, 1e-6, 200, opts, ReadoutConfig{}.ideal());
      std::vector<double> t, y;
      for (const auto& p : curve) {
        t.push_back(p.t_s);
        y.push_back(p.signal);
      }
      FitOptions fo;
      fo.free_phase = true;
      const double f_fit = fit_damped_sine(t, y, fo).frequency_hz();
      EXPECT_LT(std::abs(f_fit - fft_rabi_frequency(t, y)), 2.0 * fft_bin_width(t));
    }
}

TEST(Contrast, Basics) {
  const std::vector<double> c{0.2155, 0.2155}, b{0.7845, 0.7845};
  EXPECT_NEAR(contrast(c, b), 0.569, 1e-12);
  EXPECT_EQ(contrast(std::vector<double>{0, 0}, std::vector<double>{1, 1}), 1.0);
  EXPECT_EQ(contrast(b, b), 0.0);
  EXPECT_THROW(contrast({}, b), AnalysisError);
}

TEST(Contrast, AffineEquivariance) {
  const std::vector<double> c{0.07, 0.18}, b{0.69, 0.77};
  for (double a : {0.5, 2.0, 3.7})
    for (double off : {-0.2, 0.0, 0.4}) {
      std::vector<double> c2, b2;
      for (double v : c)
        c2.push_back(a * v + off);
      for (double v : b)
        b2.push_back(a * v + off);
      EXPECT_NEAR(contrast(c2, b2), a * contrast(c, b), 1e-12);
    }
}

TEST(PiTime, MinimumOfCurve) {
  // damped, so the first minimum is the deepest
  const auto rec = synth(0.5, 0.5, 1e6, 7.87e6, 1001, 1e-6);
  EXPECT_NEAR(pi_time_from_curve(rec.t, rec.y), 63.5e-9, 1e-9);
}
