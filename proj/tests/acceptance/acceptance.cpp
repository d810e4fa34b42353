// Acceptance checks 1-9, one line each. Exit status is nonzero when the set
// of failing checks differs from the --known-failure list (default empty).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "nvsim/analysis.hpp"
#include "nvsim/config.hpp"
#include "nvsim/pulse_dsl.hpp"
#include "nvsim/pulse_engine.hpp"
#include "nvsim/rdj.hpp"
#include "nvsim/readout.hpp"
#include "nvsim/spin_core.hpp"
#include "../unit/test_support.hpp"

using namespace nvsim;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SpinSystem calibrated_system() { return RunConfig::defaults().system; }

Outcome transitions() {
  const auto [lo, hi] = transition_frequencies({2.8449e9, 19.5e6});
  const bool ok = std::abs(lo - 2.8254e9) < 1e3 && std::abs(hi - 2.8644e9) < 1e3;
  return {ok, fmt("f1 = %.6f GHz, f2 = %.6f GHz", lo * 1e-9, hi * 1e-9)};
}

// 1 ns grid over 1 us.
std::pair<std::vector<double>, std::vector<double>> nutation(Channel ch, std::size_t n) {
  const auto curve = nutation_curve(calibrated_system(), ch, 1e-6, n, SimOptions{},
                                    ReadoutConfig{}.ideal());
  std::vector<double> t, y;
  for (const auto& p : curve) {
    t.push_back(p.t_s);
    y.push_back(p.signal);
  }
  return {t, y};
}

Outcome pi_times() {
  double worst_s = 0.0;
  std::string d;
  const struct {
    Channel ch;
    double expect_ns;
  } cases[] = {{Channel::MW1, 1e9 / (2 * 7.87e6)}, {Channel::MW2, 1e9 / (2 * 4.26e6)}};
  bool ok = true;
  for (const auto& c : cases) {
    const auto start = Clock::now();
    const auto [t, y] = nutation(c.ch, 1001);
    const double pi_ns = pi_time_from_curve(t, y) * 1e9;
    worst_s = std::max(worst_s, std::chrono::duration<double>(Clock::now() - start).count());
    ok = ok && std::abs(pi_ns - c.expect_ns) <= 1.0;
    d += fmt("%s pi = %.1f ns (expect %.1f) ", std::string(to_string(c.ch)).c_str(), pi_ns,
             c.expect_ns);
  }
  ok = ok && worst_s < 1.0;
  return {ok, d + fmt("slowest curve %.3f s", worst_s)};
}

Outcome rabi_recovery() {
  bool ok = true;
  std::string d;
  for (const auto& [ch, f] : {std::pair{Channel::MW1, 7.87e6}, std::pair{Channel::MW2, 4.26e6}}) {
    const auto [t, y] = nutation(ch, 200);
    FitOptions fo;
    fo.mode = FitMode::Normalized;
    fo.free_phase = true;
    const double f_fit = fit_damped_sine(t, y, fo).frequency_hz();
    const double f_fft = fft_rabi_frequency(t, y);
    ok = ok && std::abs(f_fit - f) < 0.02e6 && std::abs(f_fft - f) < 0.02e6;
    d += fmt("%s fit %.4f fft %.4f MHz ", std::string(to_string(ch)).c_str(), f_fit * 1e-6,
             f_fft * 1e-6);
  }
  return {ok, d};
}

Outcome truth_table() {
  RdjOptions o;
  o.sim = SimOptions::ideal();
  o.readout = ReadoutConfig{}.ideal();
  const auto res = run_rdj_all(calibrated_system(), o);
  bool ok = true;
  std::string d = "p0 =";
  for (const auto& r : res) {
    const double want = r.oracle <= 2 ? 0.0 : 1.0;
    ok = ok && std::abs(r.p0 - want) < 1e-6;
    d += fmt(" %.2e", r.p0);
  }
  return {ok, d};
}

// Straight-line oracle: product of closed-form resonant rotations.
Matrix3c rotation(Channel ch, double angle_pi, double phase) {
  const int q = ch == Channel::MW1 ? 2 : 0;
  const double th = angle_pi * std::numbers::pi / 2.0;
  Matrix3c u = Matrix3c::Identity();
  u(1, 1) = u(q, q) = std::cos(th);
  u(1, q) = -Complex{0, 1} * std::sin(th) * std::exp(Complex{0, phase});
  u(q, 1) = -Complex{0, 1} * std::sin(th) * std::exp(Complex{0, -phase});
  return u;
}

Outcome oracle_unitaries() {
  const auto sys = calibrated_system();
  double worst = 0.0, leak = 0.0, worst_ref = 0.0;
  for (const OracleId id : OracleId::all()) {
    const auto frag = oracle_sequence(id);
    Matrix3c ref = Matrix3c::Identity();
    for (const auto& ev : frag)
      ref = rotation(ev.channel, *ev.angle_pi, ev.phase) * ref;
    const Matrix3c u = fragment_unitary(frag, sys);
    const Matrix2c v = oracle_matrix(id);
    const auto dist = [&](const Matrix2c& a) {
      const Complex ov = (v.adjoint() * a).trace();
      const Complex ph = std::abs(ov) > 0 ? ov / std::abs(ov) : Complex{1.0};
      return (a - ph * v).norm();
    };
    worst = std::max(worst, dist(u.block<2, 2>(1, 1)));
    worst_ref = std::max(worst_ref, (u - ref).norm());
    leak = std::max(leak, std::abs(u(0, 1)) + std::abs(u(0, 2)));
  }
  const bool ok = worst < 1e-9 && leak < 1e-9 && worst_ref < 1e-9;
  return {ok, fmt("max distance %.1e, leakage %.1e, vs product oracle %.1e", worst, leak,
                  worst_ref)};
}

Outcome dephasing_accounting() {
  const auto sys = calibrated_system();
  std::vector<PulseSequence> programs;
  for (const OracleId id : OracleId::all())
    programs.push_back(build_rdj_program(id));
  const double predicted = predicted_contrast(programs, sys);
  RdjOptions o;
  o.readout = ReadoutConfig{}.ideal();
  const auto res = run_rdj_all(sys, o);
  const double simulated =
      contrast(std::vector<double>{res[0].signal, res[1].signal},
               std::vector<double>{res[2].signal, res[3].signal});
  const bool ok = std::abs(predicted - 0.596) < 1e-6 && std::abs(simulated - predicted) < 0.01;
  return {ok, fmt("R = %.4e /s, closed form %.4f, simulated %.4f (diff %.4f)",
                  sys.mw1.dephasing_rate, predicted, simulated, simulated - predicted)};
}

Outcome cptp() {
  const auto sys = calibrated_system();
  const auto readout = ReadoutConfig{}.ideal();
  std::mt19937_64 rng(1234);
  double trace_err = 0.0, min_eig = 1.0, purity_err = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const auto seq = testing_support::random_program(rng, 20);
    const auto rho0 = DensityMatrix3::basis_state(Level::Zero);
    for (auto model : {DephasingModel::Lindblad, DephasingModel::Quasistatic}) {
      SimOptions opts;
      opts.dephasing = model;
      opts.quasistatic_samples = 16;
      const auto r = run_sequence(rho0, seq, sys, opts, readout);
      trace_err = std::max(trace_err, r.final_state.trace_error());
      min_eig = std::min(min_eig, r.final_state.min_eigenvalue());
    }
    const auto r = run_sequence(rho0, seq, sys, SimOptions::ideal(), readout);
    trace_err = std::max(trace_err, r.final_state.trace_error());
    min_eig = std::min(min_eig, r.final_state.min_eigenvalue());
    purity_err = std::max(purity_err, std::abs(r.final_state.purity() - 1.0));
  }
  const bool ok = trace_err < 1e-9 && min_eig > -1e-8 && purity_err < 1e-9;
  return {ok, fmt("trace err %.1e, min eigenvalue %.1e, purity err %.1e", trace_err, min_eig,
                  purity_err)};
}

Outcome parser() {
  const auto sys = calibrated_system();
  std::mt19937_64 rng(77);
  int round_trip_bad = 0;
  double merge_worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const auto seq = testing_support::random_program(rng, 20);
    if (parse(serialize(seq)).events != seq.events)
      ++round_trip_bad;
    const auto rho0 = DensityMatrix3::basis_state(Level::Zero);
    for (auto model : {DephasingModel::None, DephasingModel::Lindblad}) {
      SimOptions opts;
      opts.dephasing = model;
      const auto a = run_sequence(rho0, seq, sys, opts, ReadoutConfig{});
      const auto b = run_sequence(rho0, merge_adjacent(seq), sys, opts, ReadoutConfig{});
      merge_worst = std::max(merge_worst,
                             (a.final_state.matrix() - b.final_state.matrix()).cwiseAbs().maxCoeff());
    }
  }

  // Half pure noise, half mutated valid programs so the fuzz reaches past
  // the first token.
  std::uniform_int_distribution<int> len(0, 96), byte(0, 255), coin(0, 1);
  int parsed = 0, rejected = 0, other = 0;
  for (int n = 0; n < 100'000; ++n) {
    std::string s;
    if (coin(rng)) {
      s.resize(static_cast<std::size_t>(len(rng)));
      for (auto& c : s)
        c = static_cast<char>(byte(rng));
    } else {
      s = serialize(testing_support::random_program(rng, 6));
      if (!s.empty())
        for (int k = byte(rng) % 4; k >= 0; --k)
          s[static_cast<std::size_t>(byte(rng)) % s.size()] = static_cast<char>(byte(rng));
    }
    try {
      const auto seq = parse(s);
      // anything accepted must be a well-formed program
      if (parse(serialize(seq)).events != seq.events)
        ++other;
      else
        ++parsed;
    } catch (const ParseError&) {
      ++rejected;
    } catch (...) {
      ++other;
    }
  }
  const bool ok = round_trip_bad == 0 && other == 0 && merge_worst < 1e-9;
  return {ok, fmt("round trip failures %d, fuzz parsed %d rejected %d other %d, merge %.1e",
                  round_trip_bad, parsed, rejected, other, merge_worst)};
}

Outcome shot_noise() {
  const double truth = 0.4;
  std::vector<double> logn, logsd;
  for (double n : {1e3, 1e4, 1e5, 1e6, 1e7}) {
    ReadoutConfig cfg;
    cfg.n_averages = static_cast<std::uint64_t>(n);
    double m = 0.0, m2 = 0.0;
    const int seeds = 2000;
    for (int s = 0; s < seeds; ++s) {
      const double x = simulate_shots(truth, cfg, static_cast<std::uint64_t>(s) + 1).normalized;
      m += x;
      m2 += x * x;
    }
    m /= seeds;
    logn.push_back(std::log(n));
    logsd.push_back(0.5 * std::log((m2 / seeds - m * m) * seeds / (seeds - 1)));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < logn.size(); ++i) {
    mx += logn[i];
    my += logsd[i];
  }
  mx /= logn.size();
  my /= logn.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < logn.size(); ++i) {
    sxy += (logn[i] - mx) * (logsd[i] - my);
    sxx += (logn[i] - mx) * (logn[i] - mx);
  }
  const double slope = sxy / sxx;

  ReadoutConfig cfg; // 5e7 averages
  const double sigma = shot_noise_sigma(truth, cfg);
  int within = 0;
  for (int s = 0; s < 1000; ++s)
    within += std::abs(simulate_shots(truth, cfg, 10'000 + s).normalized - truth) < 3 * sigma;
  const bool ok = std::abs(slope + 0.5) <= 0.05 && within >= 990;
  return {ok, fmt("slope %.4f, within 3 sigma %d/1000", slope, within)};
}

} // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--known-failure")
      known.insert(std::stoi(argv[++i]));

  const struct {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  } checks[] = {
      {"transition structure", 1e-3, transitions},
      {"pi-pulse calibration", 2.0, pi_times},
      {"Rabi frequency recovery", 1.0, rabi_recovery},
      {"ideal RDJ truth table", 1.0, truth_table},
      {"oracle unitary equivalence", 1.0, oracle_unitaries},
      {"dephasing accounting", 5.0, dephasing_accounting},
      {"CPTP properties", 30.0, cptp},
      {"parser robustness", 60.0, parser},
      {"shot-noise statistics", 30.0, shot_noise},
  };

  std::set<int> failed;
  int k = 0;
  for (const auto& c : checks) {
    ++k;
    const auto start = Clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool ok = out.ok && secs < c.budget_s;
    if (!ok)
      failed.insert(k);
    std::printf("%s %d %-28s %8.3f s  %s%s\n", ok ? "PASS" : "FAIL", k, c.name, secs,
                out.detail.c_str(), known.count(k) ? "  [known failure]" : "");
  }
  std::printf("%zu/%d passed\n", std::size(checks) - failed.size(), k);
  return failed == known ? 0 : 1;
}
