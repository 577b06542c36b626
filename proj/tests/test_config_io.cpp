#include "uavsense/config_io.hpp"
#include "uavsense/results_io.hpp"
#include "uavsense/sweep.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace uavsense;

namespace
{
std::string field_of(const std::function<void()>& fn)
{
  try
  {
    fn();
  }
  catch (const config_error& e)
  {
    return e.field();
  }
  return "<no error>";
}

SweepRow sample_row(double p)
{
  return {"cell_size_constant_coverage", 0.1, beamformer_kind::ls, fusion_kind::prenorm_average, -12.5, 2, 500, 417,
          p, 1.0 / 3.0, 18446744073709551615ULL};
}
} // namespace

TEST(ParseConfig, EmptyGivesDefaults)
{
  const auto c = parse_config_text("").scenario;
  const ScenarioConfig d;
  EXPECT_EQ(config_echo(parse_config_text("")), config_echo(RunConfig{}));
  EXPECT_EQ(c.uav_count, 16);
  EXPECT_EQ(c.grid_side, 20);
  EXPECT_EQ(c.symbols, 16);
  EXPECT_EQ(c.subcarriers, 64);
  EXPECT_EQ(c.array_side, 8);
  EXPECT_EQ(c.area_side_m, 100.0);
  EXPECT_EQ(c.noise_density_dbm_per_hz, -174.0);
  EXPECT_EQ(c.ground_rcs_dbsm, -30.0);
  EXPECT_EQ(c.target_rcs_dbsm, 10.0);
  EXPECT_EQ(c.carrier_frequency_hz, 24e9);
  EXPECT_EQ(c.bandwidth_hz, 200e6);
  EXPECT_EQ(c.cp_duration_s, 2.3e-6);
  EXPECT_EQ(c.doppler_hz, 0.0);
  EXPECT_FALSE(c.altitude_m.has_value());
  EXPECT_NEAR(c.wavelength_m(), 0.0125, 1e-5);
  EXPECT_EQ(c.ground_rcs_m2(), d.ground_rcs_m2());
}

TEST(ParseConfig, OverridesCommentsAndWhitespace)
{
  const auto c = parse_config_text(R"(
# cell grid
scenario.ground_rcs_dbsm = -10   # dBsm
  scenario.altitude_m=120.5
sim.deltas = 0, 1,2
sim.fast_path = off
beamformer.kind = ls
fusion.kind = prenorm
sweep.param = altitude
sweep.values = 50, 100
)");
  EXPECT_NEAR(c.scenario.ground_rcs_m2(), 0.1, 1e-15);
  EXPECT_EQ(c.scenario.altitude_m, 120.5);
  EXPECT_EQ(c.scenario.deltas, (std::vector<int>{0, 1, 2}));
  EXPECT_FALSE(c.scenario.fast_path);
  EXPECT_EQ(c.scenario.beamformer, beamformer_kind::ls);
  EXPECT_EQ(c.scenario.fusion, fusion_kind::prenorm_average);
  EXPECT_EQ(c.sweep.param, sweep_param::altitude);
  EXPECT_EQ(c.sweep.values, (std::vector<double>{50.0, 100.0}));
}

TEST(ParseConfig, ErrorsNameTheField)
{
  EXPECT_EQ(field_of([] { parse_config_text("scenario.uav_count = 15"); }), "scenario.uav_count");
  EXPECT_EQ(field_of([] { parse_config_text("scenario.grid_side = 10\nscenario.uav_count = 9"); }), "scenario.grid_side");
  EXPECT_EQ(field_of([] { parse_config_text("scenario.bogus = 1"); }), "scenario.bogus");
  EXPECT_EQ(field_of([] { parse_config_text("ofdm.symbols = 1.5"); }), "ofdm.symbols");
  EXPECT_EQ(field_of([] { parse_config_text("ofdm.bandwidth_hz = fast"); }), "ofdm.bandwidth_hz");
  EXPECT_EQ(field_of([] { parse_config_text("scenario.ground_rcs_dbsm = 10"); }), "scenario.ground_rcs_dbsm");
  EXPECT_EQ(field_of([] { parse_config_text("beamformer.kind = mvdr"); }), "beamformer.kind");
  EXPECT_EQ(field_of([] { parse_config_text("just words"); }), "line 1");
}

TEST(ParseConfig, InlineOverride)
{
  RunConfig c;
  apply_override(c, "scenario.grid_side = 8");
  EXPECT_EQ(c.scenario.grid_side, 8);
  apply_override(c, "scenario.altitude_m=auto");
  EXPECT_FALSE(c.scenario.altitude_m);
  EXPECT_THROW(apply_override(c, "no_equals"), config_error);
}

TEST(ParseConfig, EchoRoundTripsExactly)
{
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(1.0, 2.0);
  RunConfig c;
  c.scenario.transmit_power_w = u(gen) / 3.0;
  c.scenario.area_side_m = 100.0 / 3.0;
  c.scenario.carrier_frequency_hz = 24e9 + u(gen);
  c.scenario.cp_duration_s = 2.3e-6 * u(gen);
  c.scenario.altitude_m = 0.1 + 0.2;
  c.scenario.master_seed = 0xfedcba9876543210ULL;
  c.scenario.deltas = {0, 3};
  c.sweep = preset("fig7");
  const auto back = parse_config_text(config_echo(c));
  EXPECT_EQ(back.scenario.transmit_power_w, c.scenario.transmit_power_w);
  EXPECT_EQ(back.scenario.area_side_m, c.scenario.area_side_m);
  EXPECT_EQ(back.scenario.carrier_frequency_hz, c.scenario.carrier_frequency_hz);
  EXPECT_EQ(back.scenario.cp_duration_s, c.scenario.cp_duration_s);
  EXPECT_EQ(back.scenario.altitude_m, c.scenario.altitude_m);
  EXPECT_EQ(back.scenario.master_seed, c.scenario.master_seed);
  EXPECT_EQ(back.sweep.values, c.sweep.values);
  EXPECT_EQ(config_echo(back), config_echo(c));
}

TEST(Csv, HeaderAndOneRow)
{
  std::ostringstream out;
  write_csv(out, {sample_row(0.834)});
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find("\r\n")),
            "sweep_param,sweep_value,beamformer,fusion,sigma_G_dBsm,delta,trials,hits,p_detect,ci95_halfwidth,seed");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_EQ(text.find(';'), std::string::npos);
}

TEST(Csv, RoundTripsExactly)
{
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<SweepRow> rows;
  for (int i = 0; i < 50; ++i)
    rows.push_back(sample_row(u(gen)));
  rows[3].sweep_param = "odd,\"name\"";
  rows[4].sweep_value = 1e-300;
  std::stringstream io;
  write_csv(io, rows);
  const auto back = read_csv(io);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    EXPECT_EQ(back[i].sweep_param, rows[i].sweep_param);
    EXPECT_EQ(back[i].sweep_value, rows[i].sweep_value);
    EXPECT_EQ(back[i].beamformer, rows[i].beamformer);
    EXPECT_EQ(back[i].fusion, rows[i].fusion);
    EXPECT_EQ(back[i].ground_rcs_dbsm, rows[i].ground_rcs_dbsm);
    EXPECT_EQ(back[i].delta, rows[i].delta);
    EXPECT_EQ(back[i].trials, rows[i].trials);
    EXPECT_EQ(back[i].hits, rows[i].hits);
    EXPECT_EQ(back[i].p_detect, rows[i].p_detect);
    EXPECT_EQ(back[i].ci95_halfwidth, rows[i].ci95_halfwidth);
    EXPECT_EQ(back[i].seed, rows[i].seed);
  }
  std::istringstream bad("not,a,header\n");
  EXPECT_THROW(read_csv(bad), results_error);
}

TEST(Manifest, CarriesSeedAndReproducibleConfig)
{
  RunConfig c;
  c.scenario.master_seed = 987654321;
  c.scenario.trials = 17;
  c.sweep = preset("fig4");
  const auto j = manifest_json(c, {sample_row(0.5)}, "2026-01-01T00:00:00Z");
  EXPECT_EQ(j.at("master_seed").get<std::uint64_t>(), 987654321u);
  EXPECT_EQ(j.at("timestamp"), "2026-01-01T00:00:00Z");
  EXPECT_EQ(j.at("version"), UAVSENSE_VERSION);
  EXPECT_EQ(j.at("rows").size(), 1u);
  EXPECT_EQ(j.at("rows")[0].at("p_detect").get<double>(), 0.5);
  EXPECT_EQ(config_echo(config_from_manifest(j)), config_echo(c));

  const auto reparsed = nlohmann::ordered_json::parse(j.dump());
  EXPECT_EQ(reparsed.at("rows")[0].at("ci95_halfwidth").get<double>(), 1.0 / 3.0);
}

TEST(Manifest, UnwritablePathAndEmptyTable)
{
  EXPECT_THROW(write_results("/nonexistent-dir/x.csv", "csv", RunConfig{}, {sample_row(0.1)}), results_error);
  EXPECT_THROW(write_results("/tmp/uavsense-empty.csv", "csv", RunConfig{}, {}), results_error);
  EXPECT_THROW(write_results("/tmp/uavsense-x.txt", "xml", RunConfig{}, {sample_row(0.1)}), results_error);
}

TEST(Presets, ConstantCoverageAxes)
{
  const auto spec = preset("fig3");
  EXPECT_EQ(spec.param, sweep_param::cell_size_constant_coverage);
  EXPECT_EQ(spec.values, (std::vector<double>{0.5, 1, 2, 4, 8, 16}));
  EXPECT_EQ(spec.beamformers.size(), 2u);
  EXPECT_EQ(spec.fusions.size(), 2u);
  EXPECT_EQ(sweep_configs(spec, ScenarioConfig{}).size(), 6u * 2u * 4u);
  EXPECT_THROW(preset("fig9"), config_error);
  for (const char* name : {"fig3", "fig4", "fig5", "fig6", "fig7"})
    EXPECT_NO_THROW(sweep_configs(preset(name), ScenarioConfig{})) << name;
}

TEST(Presets, PointConfigurations)
{
  const ScenarioConfig base;
  const auto cov = config_for_point(base, sweep_param::cell_size_constant_coverage, 2.0);
  EXPECT_EQ(cov.area_side_m, 40.0);
  EXPECT_EQ(cov.grid_side, 20);
  EXPECT_DOUBLE_EQ(cov.cell_size_m(), 2.0);

  const auto area = config_for_point(base, sweep_param::cell_size_constant_area, 25.0);
  EXPECT_EQ(area.grid_side, 4);
  EXPECT_EQ(area.area_side_m, 100.0);
  EXPECT_NEAR(*area.altitude_m, 158.96, 0.01);

  const auto ant = config_for_point(base, sweep_param::antennas, 4.0);
  EXPECT_EQ(ant.array_side, 4);
  EXPECT_FALSE(ant.altitude_m);

  EXPECT_EQ(config_for_point(base, sweep_param::altitude, 77.0).altitude_m, 77.0);
  EXPECT_EQ(config_for_point(base, sweep_param::ground_rcs, -3.0).ground_rcs_dbsm, -3.0);
}

TEST(Presets, InvalidPointsReportedTogether)
{
  SweepSpec spec;
  spec.param = sweep_param::antennas;
  spec.values = {4.0, 2.5, 1.0};
  try
  {
    sweep_configs(spec, ScenarioConfig{});
    FAIL() << "accepted invalid antenna counts";
  }
  catch (const sweep_error& e)
  {
    const std::string what = e.what();
    EXPECT_NE(what.find("2.5"), std::string::npos);
    EXPECT_NE(what.find("1.0"), std::string::npos);
    EXPECT_EQ(what.find("4.0"), std::string::npos);
  }
  EXPECT_THROW(parse_sweep_param("width"), config_error);
}
