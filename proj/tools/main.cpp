#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "nvsim/pulse_dsl.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nvsim: pulse-level simulator of an NV-center spin qutrit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::filesystem::path> config_file;
  std::optional<std::uint64_t> seed;
  app.add_option("-c,--config", config_file, "JSON run configuration")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "override the configured seed");

  cli::NutationArgs nut;
  auto* nutation = app.add_subcommand("nutation", "nutation curve with fit and FFT");
  nutation->add_option("--channel", nut.channel, "mw1 or mw2")->capture_default_str();
  nutation->add_option("--t-max", nut.t_max_s, "record length in seconds")->capture_default_str();
  nutation->add_option("--points", nut.points, "number of samples")->capture_default_str();
  nutation->add_option("-o,--out-dir", nut.out_dir, "output directory")->capture_default_str();

  cli::RdjArgs rdj;
  bool ideal = false, dephased = false, shots = false;
  auto* rdj_cmd = app.add_subcommand("rdj", "refined Deutsch-Jozsa runs");
  rdj_cmd->add_option("--oracle", rdj.oracle, "1, 2, 3, 4 or all")->capture_default_str();
  auto* f_ideal = rdj_cmd->add_flag("--ideal", ideal, "unitary model, perfect polarisation");
  auto* f_deph = rdj_cmd->add_flag("--dephased", dephased, "configured dephasing (default)");
  auto* f_shots = rdj_cmd->add_flag("--shots", shots, "dephasing, configured readout, shot noise");
  f_ideal->excludes(f_deph)->excludes(f_shots);
  f_deph->excludes(f_shots);
  rdj_cmd->add_flag("--compensate", rdj.compensate, "undo the predicted dephasing visibility");
  rdj_cmd->add_option("--csv", rdj.csv, "per-oracle CSV")->capture_default_str();
  rdj_cmd->add_option("--shots-csv", rdj.shots_csv, "shot CSV (with --shots)")
      ->capture_default_str();

  cli::RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "execute a .seq pulse program");
  run_cmd->add_option("--sequence", run.sequence, ".seq file")->required();
  run_cmd->add_flag("--ideal", run.ideal, "unitary model, perfect polarisation");

  cli::FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "damped-sine fit of a t_s,signal CSV");
  fit_cmd->add_option("--input", fit.input, "CSV file")->required()->check(CLI::ExistingFile);
  fit_cmd->add_flag("--normalized", fit.normalized, "hold y0 = A = 0.5");
  fit_cmd->add_flag("--free-phase", fit.free_phase, "fit a phase offset");

  std::filesystem::path fft_input;
  auto* fft_cmd = app.add_subcommand("fft", "dominant frequency of a t_s,signal CSV");
  fft_cmd->add_option("--input", fft_input, "CSV file")->required()->check(CLI::ExistingFile);

  bool print_defaults = false;
  auto* config_cmd = app.add_subcommand("config", "configuration utilities");
  config_cmd->add_flag("--print-defaults", print_defaults, "dump the built-in configuration")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*config_cmd) {
      std::cout << nvsim::dump_config(nvsim::RunConfig::defaults());
      return 0;
    }
    if (*fit_cmd)
      return cli::cmd_fit(fit, std::cout);
    if (*fft_cmd)
      return cli::cmd_fft(fft_input, std::cout);

    auto cfg = cli::load(config_file);
    if (seed)
      cfg.seed = *seed;
    if (*nutation)
      return cli::cmd_nutation(cfg, nut, std::cout);
    if (*rdj_cmd) {
      rdj.mode = ideal ? cli::RdjMode::Ideal : shots ? cli::RdjMode::Shots : cli::RdjMode::Dephased;
      return cli::cmd_rdj(cfg, rdj, std::cout);
    }
    return cli::cmd_run(cfg, run, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "nvsim: " << e.what() << '\n';
    return 1;
  }
}
