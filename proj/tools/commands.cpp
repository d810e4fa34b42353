#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nvsim/analysis.hpp"
#include "nvsim/pulse_dsl.hpp"
#include "nvsim/pulse_engine.hpp"
#include "nvsim/rdj.hpp"
#include "nvsim/readout.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nvsim;

namespace cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path())
    fs::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f)
    throw CommandError("cannot write " + p.string());
  return f;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f)
    throw CommandError("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// CSV with header t_s,signal
std::pair<std::vector<double>, std::vector<double>> read_curve(const fs::path& p) {
  std::istringstream in(read_file(p));
  std::string line;
  if (!std::getline(in, line) || (line != "t_s,signal" && line != "t_s,signal\r"))
    throw CommandError(p.string() + ": expected header 't_s,signal'");
  std::vector<double> t, y;
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (line.empty() || line == "\r")
      continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos)
        throw std::invalid_argument("missing comma");
      t.push_back(std::stod(line.substr(0, comma)));
      y.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw CommandError(p.string() + ":" + std::to_string(n) + ": malformed row");
    }
  }
  return {t, y};
}

Channel parse_channel(const std::string& s) {
  if (s == "mw1" || s == "MW1")
    return Channel::MW1;
  if (s == "mw2" || s == "MW2")
    return Channel::MW2;
  throw CommandError("invalid channel '" + s + "' (expected mw1 or mw2)");
}

json fit_json(const DampedSineFit& f) {
  return {{"y0", f.y0},
          {"A", f.amplitude},
          {"R", f.rate},
          {"omega", f.omega},
          {"phase", f.phase},
          {"frequency_hz", f.frequency_hz()},
          {"residual_rms", f.residual_rms},
          {"converged", f.converged},
          {"iterations", f.iterations}};
}

std::string lower(std::string_view s) {
  std::string r(s);
  for (auto& c : r)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return r;
}

} // namespace

RunConfig load(const std::optional<fs::path>& config_file) {
  return config_file ? load_config(*config_file) : RunConfig::defaults();
}

int cmd_nutation(const RunConfig& cfg, const NutationArgs& args, std::ostream& out) {
  const Channel ch = parse_channel(args.channel);
  const auto curve =
      nutation_curve(cfg.system, ch, args.t_max_s, args.points, cfg.sim, cfg.readout.ideal());
  std::vector<double> t, y;
  for (const auto& p : curve) {
    t.push_back(p.t_s);
    y.push_back(p.signal);
  }

  const std::string stem = "nutation_" + lower(to_string(ch));
  const fs::path csv = args.out_dir / (stem + ".csv");
  {
    auto f = open_out(csv);
    f << "t_s,signal\n";
    for (std::size_t i = 0; i < t.size(); ++i)
      f << num(t[i]) << ',' << num(y[i]) << '\n';
  }

  // The nutation envelope carries a quadrature term, so the phase is left free.
  FitOptions fo;
  fo.mode = FitMode::Normalized;
  fo.free_phase = true;
  json j = fit_json(fit_damped_sine(t, y, fo));
  j["channel"] = lower(to_string(ch));
  try {
    j["fft_frequency_hz"] = fft_rabi_frequency(t, y);
  } catch (const AnalysisError&) {
    j["fft_frequency_hz"] = nullptr;
  }
  j["pi_time_s"] = pi_time_from_curve(t, y);
  const fs::path fit = args.out_dir / (stem + "_fit.json");
  open_out(fit) << j.dump(2) << '\n';
  out << csv.string() << '\n' << fit.string() << '\n';
  return 0;
}

int cmd_rdj(const RunConfig& cfg, const RdjArgs& args, std::ostream& out) {
  std::vector<OracleId> ids;
  if (args.oracle == "all") {
    for (const OracleId id : OracleId::all())
      ids.push_back(id);
  } else {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(args.oracle, &used);
      if (used != args.oracle.size())
        k = 0;
    } catch (const std::exception&) {
    }
    if (k < 1 || k > 4)
      throw CommandError("unknown oracle id '" + args.oracle + "' (expected 1, 2, 3, 4 or all)");
    ids.push_back(OracleId{k});
  }

  RdjOptions opts;
  opts.sim = cfg.sim;
  opts.readout = cfg.readout.ideal();
  opts.seed = cfg.seed;
  switch (args.mode) {
  case RdjMode::Ideal: opts.sim = SimOptions::ideal(); break;
  case RdjMode::Dephased: break;
  case RdjMode::Shots:
    opts.readout = cfg.readout;
    opts.sample_shots = true;
    break;
  }

  std::vector<RdjResult> results;
  if (ids.size() == 4)
    results = run_rdj_all(cfg.system, opts);
  else
    results.push_back(run_rdj(ids.front(), cfg.system, opts));

  auto csv = open_out(args.csv);
  csv << "oracle,p0,signal,signal_compensated,classification\n";
  std::optional<std::ofstream> shots;
  if (args.mode == RdjMode::Shots) {
    shots = open_out(args.shots_csv);
    *shots << "oracle,seed,counts,normalized\n";
  }

  std::vector<PulseSequence> programs;
  for (const OracleId id : OracleId::all())
    programs.push_back(build_rdj_program(id));
  // One visibility for the whole protocol, the mean over the four programs.
  const double vis = args.mode == RdjMode::Ideal ? 1.0 : predicted_contrast(programs, cfg.system);

  std::vector<double> constant, balanced;
  for (const auto& r : results) {
    const double signal = r.shots ? r.shots->normalized : r.signal;
    const auto comp = args.compensate ? compensate_dephasing(signal, vis) : Compensated{signal, false};
    const auto cls = to_string(r.classification);

    json j = {{"oracle", r.oracle},
              {"p0", r.p0},
              {"signal", signal},
              {"signal_compensated", comp.value},
              {"clipped", comp.clipped},
              {"visibility", vis},
              {"classification", cls}};
    if (r.shots) {
      const auto seed = oracle_seed(cfg.seed, OracleId{r.oracle});
      j["seed"] = seed;
      j["counts"] = r.shots->counts;
      *shots << r.oracle << ',' << seed << ',' << r.shots->counts << ','
             << num(r.shots->normalized) << '\n';
    }
    out << j.dump() << '\n';
    csv << r.oracle << ',' << num(r.p0) << ',' << num(signal) << ',' << num(comp.value) << ','
        << cls << '\n';
    (OracleId{r.oracle}.is_constant() ? constant : balanced).push_back(signal);
  }

  if (!constant.empty() && !balanced.empty()) {
    json summary = {{"contrast", contrast(constant, balanced)}};
    if (args.mode != RdjMode::Ideal)
      summary["predicted_contrast"] = vis;
    out << summary.dump() << '\n';
  }
  return 0;
}

int cmd_run(const RunConfig& cfg, const RunArgs& args, std::ostream& out) {
  const std::string text = read_file(args.sequence);
  PulseSequence seq;
  try {
    seq = parse(text, args.sequence.filename().string());
  } catch (const ParseError& e) {
    throw CommandError(args.sequence.string() + ":" + std::to_string(e.line()) + ":" +
                       std::to_string(e.column()) + ": " + e.message() +
                       (e.token().empty() ? "" : " '" + e.token() + "'"));
  }
  const auto violations = validate(seq, cfg.system, from_seconds(cfg.sim.time_step_s));
  if (!violations.empty()) {
    std::string msg = args.sequence.string() + ": invalid sequence";
    for (const auto& v : violations)
      msg += "\n  event " + std::to_string(v.event_index) + ": " + v.message;
    throw CommandError(msg);
  }

  const SimOptions sim = args.ideal ? SimOptions::ideal() : cfg.sim;
  const ReadoutConfig readout = args.ideal ? cfg.readout.ideal() : cfg.readout;
  const auto r = run_sequence(initialize_state(readout), seq, cfg.system, sim, readout);

  const auto& rho = r.final_state.matrix();
  json re = json::array(), im = json::array();
  for (int i = 0; i < 3; ++i) {
    json a = json::array(), b = json::array();
    for (int k = 0; k < 3; ++k) {
      a.push_back(rho(i, k).real());
      b.push_back(rho(i, k).imag());
    }
    re.push_back(a);
    im.push_back(b);
  }
  const auto pops = r.final_state.populations();
  json readouts = json::array();
  for (const auto& s : r.readouts)
    readouts.push_back(fluorescence_signal(s, readout).normalized);
  json j = {{"sequence", args.sequence.filename().string()},
            {"basis", {"+1", "0", "-1"}},
            {"rho_real", re},
            {"rho_imag", im},
            {"populations", {pops[0], pops[1], pops[2]}},
            {"signal", fluorescence_signal(r.final_state, readout).normalized},
            {"readout_signals", readouts},
            {"elapsed_s", to_seconds(r.elapsed)}};
  out << j.dump(2) << '\n';
  return 0;
}

int cmd_fit(const FitArgs& args, std::ostream& out) {
  const auto [t, y] = read_curve(args.input);
  FitOptions fo;
  fo.mode = args.normalized ? FitMode::Normalized : FitMode::Free;
  fo.free_phase = args.free_phase;
  out << fit_json(fit_damped_sine(t, y, fo)).dump(2) << '\n';
  return 0;
}

int cmd_fft(const fs::path& input, std::ostream& out) {
  const auto [t, y] = read_curve(input);
  const double f = fft_rabi_frequency(t, y);
  json j = {{"frequency_hz", f}, {"omega", 2.0 * std::numbers::pi * f},
            {"bin_width_hz", fft_bin_width(t)}};
  out << j.dump(2) << '\n';
  return 0;
}

} // namespace cli
