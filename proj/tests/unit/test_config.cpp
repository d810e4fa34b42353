#include <gtest/gtest.h>

#include "nvsim/config.hpp"
#include "nvsim/rdj.hpp"

using namespace nvsim;

TEST(Config, Defaults) {
  const auto cfg = RunConfig::defaults();
  EXPECT_EQ(cfg.system.zfs.d_hz, 2.8449e9);
  EXPECT_EQ(cfg.system.zfs.e_hz, 19.5e6);
  EXPECT_DOUBLE_EQ(cfg.system.mw1.carrier_hz, 2.8254e9);
  EXPECT_DOUBLE_EQ(cfg.system.mw2.carrier_hz, 2.8644e9);
  EXPECT_EQ(cfg.system.mw1.rabi_hz, 7.87e6);
  EXPECT_EQ(cfg.system.mw2.rabi_hz, 4.26e6);
  EXPECT_EQ(cfg.system.mw1.dephasing_rate, cfg.system.mw2.dephasing_rate);
  EXPECT_EQ(cfg.readout.init_fidelity, 0.9);
  EXPECT_EQ(cfg.readout.n_averages, 50'000'000u);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, DefaultRatesReproduceTargetContrast) {
  const auto cfg = RunConfig::defaults();
  std::vector<PulseSequence> programs;
  for (const OracleId id : OracleId::all())
    programs.push_back(build_rdj_program(id));
  EXPECT_NEAR(predicted_contrast(programs, cfg.system), 0.596, 0.005);
}

TEST(Config, DumpParseRoundTrip) {
  auto cfg = RunConfig::defaults();
  cfg.seed = 77;
  cfg.sim.dephasing = DephasingModel::Quasistatic;
  cfg.readout.init_fidelity = 0.95;
  const auto back = parse_config(dump_config(cfg));
  EXPECT_EQ(dump_config(back), dump_config(cfg));
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.sim.dephasing, DephasingModel::Quasistatic);
}

TEST(Config, PartialOverridesKeepDefaults) {
  const auto cfg = parse_config(R"({"mw1": {"rabi_hz": 5e6}, "seed": 3})");
  EXPECT_EQ(cfg.system.mw1.rabi_hz, 5e6);
  EXPECT_EQ(cfg.system.mw2.rabi_hz, 4.26e6);
  EXPECT_EQ(cfg.seed, 3u);
}

TEST(Config, CarriersFollowZeroFieldParameters) {
  const auto cfg = parse_config(R"({"zfs": {"d_hz": 2.87e9, "e_hz": 5e6}})");
  EXPECT_DOUBLE_EQ(cfg.system.mw1.carrier_hz, 2.865e9);
  EXPECT_DOUBLE_EQ(cfg.system.mw2.carrier_hz, 2.875e9);
}

TEST(Config, DetunedCarrierNeedsOverride) {
  EXPECT_THROW(parse_config(R"({"mw1": {"carrier_hz": 2.826e9}})"), ConfigError);
  const auto cfg = parse_config(R"({"mw1": {"carrier_hz": 2.826e9}, "allow_detuning": true})");
  EXPECT_EQ(cfg.system.mw1.carrier_hz, 2.826e9);
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config(R"({"zfs": {"d_hz": 1e9, "e_hz": 2e9}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"mw3": {}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"mw1": {"rabi": 1e6}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"sim": {"dephasing_model": "gaussian"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"readout": {"init_fidelity": "high"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"readout": {"init_fidelity": 1.5}})"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/nvsim.json"), ConfigError);
}
