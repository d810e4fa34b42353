#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "nvsim/config.hpp"

namespace cli {

// Reported with exit status 1; the message goes to stderr.
class CommandError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

nvsim::RunConfig load(const std::optional<std::filesystem::path>& config_file);

struct NutationArgs {
  std::string channel = "mw1";
  double t_max_s = 1e-6;
  std::size_t points = 200;
  std::filesystem::path out_dir = ".";
};
int cmd_nutation(const nvsim::RunConfig& cfg, const NutationArgs& args, std::ostream& out);

enum class RdjMode { Ideal, Dephased, Shots };
struct RdjArgs {
  std::string oracle = "all";
  RdjMode mode = RdjMode::Dephased;
  bool compensate = false;
  std::filesystem::path csv = "rdj.csv";
  std::filesystem::path shots_csv = "rdj_shots.csv";
};
int cmd_rdj(const nvsim::RunConfig& cfg, const RdjArgs& args, std::ostream& out);

struct RunArgs {
  std::filesystem::path sequence;
  bool ideal = false;
};
int cmd_run(const nvsim::RunConfig& cfg, const RunArgs& args, std::ostream& out);

struct FitArgs {
  std::filesystem::path input;
  bool normalized = false;
  bool free_phase = false;
};
int cmd_fit(const FitArgs& args, std::ostream& out);
int cmd_fft(const std::filesystem::path& input, std::ostream& out);

} // namespace cli
