#include "nvsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nvsim/rdj.hpp"

namespace nvsim {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object())
    throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!known.count(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key))
    return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void read_channel(const json& root, const char* name, ChannelCalibration& cal,
                  bool& explicit_carrier) {
  if (!root.contains(name))
    return;
  const json& obj = root.at(name);
  reject_unknown(obj, {"carrier_hz", "rabi_hz", "dephasing_rate_per_s"}, name);
  read(obj, "rabi_hz", cal.rabi_hz, name);
  read(obj, "dephasing_rate_per_s", cal.dephasing_rate, name);
  if (obj.contains("carrier_hz")) {
    read(obj, "carrier_hz", cal.carrier_hz, name);
    explicit_carrier = true;
  }
}

json channel_json(const ChannelCalibration& cal) {
  return {{"carrier_hz", cal.carrier_hz},
          {"rabi_hz", cal.rabi_hz},
          {"dephasing_rate_per_s", cal.dephasing_rate}};
}

} // namespace

RunConfig RunConfig::defaults() {
  RunConfig cfg;
  cfg.system = SpinSystem::resonant({kDefaultD, kDefaultE}, kDefaultRabiMw1, kDefaultRabiMw2);
  const double rate = calibrate_dephasing_rate(cfg.system, kDefaultTargetContrast);
  cfg.system.mw1.dephasing_rate = rate;
  cfg.system.mw2.dephasing_rate = rate;
  return cfg;
}

void RunConfig::validate() const {
  try {
    system.validate();
    sim.validate();
    readout.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (allow_detuning)
    return;
  const LevelStructure levels = system.levels();
  for (const ChannelCalibration* cal : {&system.mw1, &system.mw2}) {
    const double line = levels.transition(cal->target());
    if (std::abs(cal->carrier_hz - line) > 1e-9 * line)
      throw ConfigError(std::string(to_string(cal->label)) + " carrier " +
                        std::to_string(cal->carrier_hz) + " Hz is off its line at " +
                        std::to_string(line) + " Hz; set allow_detuning to permit this");
  }
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  reject_unknown(root, {"zfs", "mw1", "mw2", "sim", "readout", "seed", "allow_detuning"}, "config");

  RunConfig cfg = RunConfig::defaults();
  read(root, "seed", cfg.seed, "config");
  read(root, "allow_detuning", cfg.allow_detuning, "config");

  if (root.contains("zfs")) {
    const json& z = root.at("zfs");
    reject_unknown(z, {"d_hz", "e_hz"}, "zfs");
    read(z, "d_hz", cfg.system.zfs.d_hz, "zfs");
    read(z, "e_hz", cfg.system.zfs.e_hz, "zfs");
  }
  bool carrier1 = false, carrier2 = false;
  read_channel(root, "mw1", cfg.system.mw1, carrier1);
  read_channel(root, "mw2", cfg.system.mw2, carrier2);
  try {
    const auto [f_low, f_high] = transition_frequencies(cfg.system.zfs);
    if (!carrier1)
      cfg.system.mw1.carrier_hz = f_low;
    if (!carrier2)
      cfg.system.mw2.carrier_hz = f_high;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  if (root.contains("sim")) {
    const json& s = root.at("sim");
    reject_unknown(s, {"dephasing_model", "crosstalk", "time_step_s", "quasistatic_samples",
                       "quasistatic_sigma_hz"},
                   "sim");
    if (s.contains("dephasing_model")) {
      std::string model;
      read(s, "dephasing_model", model, "sim");
      try {
        cfg.sim.dephasing = dephasing_model_from_string(model);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    }
    read(s, "crosstalk", cfg.sim.crosstalk, "sim");
    read(s, "time_step_s", cfg.sim.time_step_s, "sim");
    read(s, "quasistatic_samples", cfg.sim.quasistatic_samples, "sim");
    read(s, "quasistatic_sigma_hz", cfg.sim.quasistatic_sigma_hz, "sim");
  }

  if (root.contains("readout")) {
    const json& r = root.at("readout");
    reject_unknown(r, {"init_fidelity", "rate_bright_cps", "rate_dark_cps", "window_s",
                       "n_averages"},
                   "readout");
    read(r, "init_fidelity", cfg.readout.init_fidelity, "readout");
    read(r, "rate_bright_cps", cfg.readout.rate_bright_cps, "readout");
    read(r, "rate_dark_cps", cfg.readout.rate_dark_cps, "readout");
    read(r, "window_s", cfg.readout.window_s, "readout");
    read(r, "n_averages", cfg.readout.n_averages, "readout");
  }

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open configuration file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string dump_config(const RunConfig& cfg) {
  json root = {
      {"zfs", {{"d_hz", cfg.system.zfs.d_hz}, {"e_hz", cfg.system.zfs.e_hz}}},
      {"mw1", channel_json(cfg.system.mw1)},
      {"mw2", channel_json(cfg.system.mw2)},
      {"allow_detuning", cfg.allow_detuning},
      {"sim",
       {{"dephasing_model", std::string(to_string(cfg.sim.dephasing))},
        {"crosstalk", cfg.sim.crosstalk},
        {"time_step_s", cfg.sim.time_step_s},
        {"quasistatic_samples", cfg.sim.quasistatic_samples},
        {"quasistatic_sigma_hz", cfg.sim.quasistatic_sigma_hz}}},
      {"readout",
       {{"init_fidelity", cfg.readout.init_fidelity},
        {"rate_bright_cps", cfg.readout.rate_bright_cps},
        {"rate_dark_cps", cfg.readout.rate_dark_cps},
        {"window_s", cfg.readout.window_s},
        {"n_averages", cfg.readout.n_averages}}},
      {"seed", cfg.seed},
  };
  return root.dump(2) + "\n";
}

} // namespace nvsim
