#pragma once

#include "uavsense/config.hpp"
#include "uavsense/engine.hpp"
#include "uavsense/geometry.hpp"
#include "uavsense/sensing.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uavsense
{

enum class sweep_param
{
  none, ///< single run, no swept parameter
  cell_size_constant_coverage,
  cell_size_constant_area,
  antennas,
  altitude,
  ground_rcs
};

inline std::string_view to_string(sweep_param p)
{
  switch (p)
  {
  case sweep_param::none:
    return "none";
  case sweep_param::cell_size_constant_coverage:
    return "cell_size_constant_coverage";
  case sweep_param::cell_size_constant_area:
    return "cell_size_constant_area";
  case sweep_param::antennas:
    return "antennas";
  case sweep_param::altitude:
    return "altitude";
  case sweep_param::ground_rcs:
    return "ground_rcs";
  }
  return "none";
}

inline sweep_param parse_sweep_param(std::string_view s)
{
  for (auto p : {sweep_param::none, sweep_param::cell_size_constant_coverage, sweep_param::cell_size_constant_area,
                 sweep_param::antennas, sweep_param::altitude, sweep_param::ground_rcs})
    if (to_string(p) == s)
      return p;
  throw config_error("sweep.param", "unknown sweep parameter '" + std::string(s) + "'");
}

/// One swept parameter plus the cross-product axes evaluated at every point.
/// Empty axes fall back to the base configuration's value.
struct SweepSpec
{
  std::string name;
  sweep_param param = sweep_param::none;
  std::vector<double> values;
  std::vector<double> ground_rcs_dbsm;
  std::vector<beamformer_kind> beamformers;
  std::vector<fusion_kind> fusions;
  std::vector<int> deltas;
};

/// One output row: detection statistics for a single (point, sigma_G, beamformer, fusion, delta).
struct SweepRow
{
  std::string sweep_param;
  double sweep_value = 0.0;
  beamformer_kind beamformer = beamformer_kind::capon;
  fusion_kind fusion = fusion_kind::average;
  double ground_rcs_dbsm = 0.0;
  int delta = 0;
  long trials = 0;
  long hits = 0;
  double p_detect = 0.0;
  double ci95_halfwidth = 0.0;
  std::uint64_t seed = 0;
};

class sweep_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Configuration of one sweep point.
///  constant coverage: L and U fixed, area l = L d, altitude re-derived to keep the block inscribed;
///  constant area: l fixed, L = round(l / d), altitude held at the base altitude, UAVs on the area layout;
///  antennas: n changes, altitude re-derived; altitude: explicit h; ground_rcs: sigma_G in dBsm.
inline ScenarioConfig config_for_point(const ScenarioConfig& base, sweep_param param, double value)
{
  ScenarioConfig cfg = base;
  switch (param)
  {
  case sweep_param::none:
    break;
  case sweep_param::cell_size_constant_coverage:
    if (!(value > 0.0))
      throw config_error("sweep.values", "cell size must be > 0");
    cfg.area_side_m = cfg.grid_side * value;
    cfg.altitude_m.reset();
    break;
  case sweep_param::cell_size_constant_area: {
    if (!(value > 0.0))
      throw config_error("sweep.values", "cell size must be > 0");
    const double base_altitude = base.altitude_m ? *base.altitude_m : deploy_uavs(base, build_grid(base)).altitude;
    const long cells = std::lround(base.area_side_m / value);
    if (cells < 1)
      throw config_error("sweep.values", "cell size exceeds the area side");
    cfg.grid_side = static_cast<int>(cells);
    cfg.layout = deployment_layout::area;
    cfg.altitude_m = base_altitude;
    break;
  }
  case sweep_param::antennas:
    if (value != std::floor(value))
      throw config_error("sweep.values", "antenna count must be an integer");
    cfg.array_side = static_cast<int>(value);
    cfg.altitude_m.reset();
    break;
  case sweep_param::altitude:
    cfg.altitude_m = value;
    break;
  case sweep_param::ground_rcs:
    cfg.ground_rcs_dbsm = value;
    break;
  }
  return cfg;
}

/// Named sweep setups.
inline SweepSpec preset(std::string_view name)
{
  const std::vector<double> ground_levels{-30.0, -20.0, -10.0, 0.0};
  const std::vector<beamformer_kind> both_bf{beamformer_kind::ls, beamformer_kind::capon};
  const std::vector<fusion_kind> both_fusion{fusion_kind::average, fusion_kind::prenorm_average};
  SweepSpec spec;
  spec.name = std::string(name);
  if (name == "fig3")
  {
    spec.param = sweep_param::cell_size_constant_coverage;
    spec.values = {0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
    spec.ground_rcs_dbsm = ground_levels;
    spec.beamformers = both_bf;
    spec.fusions = both_fusion;
    spec.deltas = {0};
  }
  else if (name == "fig4")
  {
    spec.param = sweep_param::cell_size_constant_area;
    spec.values = {1.0, 2.0, 4.0, 5.0, 10.0, 20.0, 25.0};
    spec.ground_rcs_dbsm = {-30.0};
    spec.beamformers = both_bf;
    spec.fusions = both_fusion;
    spec.deltas = {0};
  }
  else if (name == "fig5")
  {
    spec.param = sweep_param::cell_size_constant_coverage;
    spec.values = {0.01, 0.1, 1.0, 5.0};
    spec.ground_rcs_dbsm = ground_levels;
    spec.beamformers = {beamformer_kind::capon};
    spec.fusions = {fusion_kind::prenorm_average};
    spec.deltas = {0, 1, 2};
  }
  else if (name == "fig6")
  {
    spec.param = sweep_param::antennas;
    spec.values = {2.0, 4.0, 6.0, 8.0, 10.0, 12.0};
    spec.ground_rcs_dbsm = ground_levels;
    spec.beamformers = both_bf;
    spec.fusions = both_fusion;
    spec.deltas = {0};
  }
  else if (name == "fig7")
  {
    // Spans the 1x1, 3x3 and 5x5 coverage regimes of the default geometry.
    spec.param = sweep_param::altitude;
    spec.values = {35.0, 50.0, 65.0, 80.0, 100.0, 115.0, 130.0, 145.0, 160.0, 175.0, 190.0, 205.0, 220.0};
    spec.ground_rcs_dbsm = {-30.0, -20.0, -10.0};
    spec.beamformers = {beamformer_kind::capon};
    spec.fusions = {fusion_kind::average};
    spec.deltas = {0, 1, 2};
  }
  else
  {
    throw config_error("preset", "unknown preset '" + std::string(name) + "' (expected fig3..fig7)");
  }
  return spec;
}

namespace detail
{
template <typename T>
std::vector<T> or_default(const std::vector<T>& axis, T fallback)
{
  return axis.empty() ? std::vector<T>{fallback} : axis;
}

/// The sigma_G axis collapses to one entry when sigma_G itself is swept.
inline std::vector<double> ground_axis(const SweepSpec& spec, const ScenarioConfig& base)
{
  if (spec.param == sweep_param::ground_rcs)
    return {base.ground_rcs_dbsm};
  return or_default(spec.ground_rcs_dbsm, base.ground_rcs_dbsm);
}
} // namespace detail

/// Resolved configurations for every (value, beamformer, sigma_G) of the sweep.
/// All points are validated before any is simulated; failures are collected
/// and reported together.
inline std::vector<ScenarioConfig> sweep_configs(const SweepSpec& spec, const ScenarioConfig& base)
{
  const auto values = spec.param == sweep_param::none ? std::vector<double>{0.0} : spec.values;
  if (values.empty())
    throw sweep_error("sweep: no sweep values given");
  const auto beamformers = detail::or_default(spec.beamformers, base.beamformer);
  const auto grounds = detail::ground_axis(spec, base);

  std::vector<ScenarioConfig> configs;
  std::string failures;
  for (double value : values)
    for (beamformer_kind bf : beamformers)
      for (double ground : grounds)
      {
        try
        {
          ScenarioConfig cfg = config_for_point(base, spec.param, value);
          cfg.beamformer = bf;
          if (spec.param != sweep_param::ground_rcs)
            cfg.ground_rcs_dbsm = ground;
          if (!spec.deltas.empty())
            cfg.deltas = spec.deltas;
          cfg.validate();
          (void)deploy_uavs(cfg, build_grid(cfg));
          configs.push_back(cfg);
        }
        catch (const std::exception& e)
        {
          failures += "\n  " + std::string(to_string(spec.param)) + " = " + std::to_string(value) + ": " + e.what();
        }
      }
  if (!failures.empty())
    throw sweep_error("sweep: invalid sweep points:" + failures);
  return configs;
}

using SweepProgress = std::function<void(const ScenarioConfig&, std::size_t done, std::size_t total)>;

/// Runs the Monte Carlo batch at every sweep point and flattens the results
/// into rows ordered by (value, beamformer, sigma_G, fusion, delta).
inline std::vector<SweepRow> sweep(const SweepSpec& spec, const ScenarioConfig& base,
                                   const SimulationOptions& options = {}, const SweepProgress& progress = {})
{
  const auto configs = sweep_configs(spec, base);
  const auto fusions = detail::or_default(spec.fusions, base.fusion);
  const auto values = spec.param == sweep_param::none ? std::vector<double>{0.0} : spec.values;
  const auto beamformers = detail::or_default(spec.beamformers, base.beamformer);
  const auto grounds = detail::ground_axis(spec, base);

  std::vector<SweepRow> rows;
  std::size_t index = 0;
  for (double value : values)
    for (std::size_t b = 0; b < beamformers.size(); ++b)
    {
      // Geometry and beamformers do not depend on sigma_G; build once per point.
      std::optional<Scenario> scenario;
      for (std::size_t g = 0; g < grounds.size(); ++g, ++index)
      {
        const ScenarioConfig& cfg = configs[index];
        if (!scenario)
          scenario.emplace(cfg);
        const Scenario point = scenario->with_ground_rcs(cfg.ground_rcs_dbsm);
        const auto outcomes = run_trials(point, cfg.trials, fusions, options);
        for (std::size_t f = 0; f < fusions.size(); ++f)
        {
          const DetectionStats stats = aggregate(outcomes[f], cfg.deltas);
          for (std::size_t d = 0; d < stats.deltas.size(); ++d)
            rows.push_back({std::string(to_string(spec.param)), value, cfg.beamformer, fusions[f], cfg.ground_rcs_dbsm,
                            stats.deltas[d], stats.trials, stats.hits[d], stats.probability(d), stats.ci95_halfwidth(d),
                            cfg.master_seed});
        }
        if (progress)
          progress(cfg, index + 1, configs.size());
      }
    }
  return rows;
}

/// Rows of a single Monte Carlo batch at the base configuration.
inline std::vector<SweepRow> run_rows(const ScenarioConfig& config, const SimulationOptions& options = {})
{
  SweepSpec single;
  single.param = sweep_param::none;
  single.fusions = {config.fusion};
  return sweep(single, config, options);
}

} // namespace uavsense
