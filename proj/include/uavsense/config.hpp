#pragma once

#include "uavsense/units.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uavsense
{

/// Raised for any invalid configuration value. `field()` names the offending key.
class config_error : public std::invalid_argument
{
public:
  config_error(std::string field, const std::string& what)
    : std::invalid_argument(field + ": " + what), field_(std::move(field))
  {
  }

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

enum class beamformer_kind
{
  ls,
  capon
};

enum class fusion_kind
{
  average,
  prenorm_average
};

/// How UAV ground projections are laid out.
///  tiled: one UAV above the centre of each (L/sqrt(U))^2 cell block; sqrt(U) must divide L.
///  area:  one UAV above the centre of each (l/sqrt(U))^2 patch of the area, for any L.
enum class deployment_layout
{
  tiled,
  area
};

inline std::string_view to_string(beamformer_kind k) { return k == beamformer_kind::ls ? "ls" : "capon"; }
inline std::string_view to_string(fusion_kind k) { return k == fusion_kind::average ? "avg" : "prenorm"; }
inline std::string_view to_string(deployment_layout k) { return k == deployment_layout::tiled ? "tiled" : "area"; }

inline beamformer_kind parse_beamformer_kind(std::string_view s)
{
  if (s == "ls")
    return beamformer_kind::ls;
  if (s == "capon")
    return beamformer_kind::capon;
  throw config_error("beamformer.kind", "expected 'ls' or 'capon', got '" + std::string(s) + "'");
}

inline fusion_kind parse_fusion_kind(std::string_view s)
{
  if (s == "avg" || s == "average")
    return fusion_kind::average;
  if (s == "prenorm" || s == "prenorm-average")
    return fusion_kind::prenorm_average;
  throw config_error("fusion.kind", "expected 'avg' or 'prenorm', got '" + std::string(s) + "'");
}

inline deployment_layout parse_layout(std::string_view s)
{
  if (s == "tiled")
    return deployment_layout::tiled;
  if (s == "area")
    return deployment_layout::area;
  throw config_error("scenario.layout", "expected 'tiled' or 'area', got '" + std::string(s) + "'");
}

/// All physical and protocol parameters of one simulated scenario.
///
/// Defaults: U = 16 UAVs over a 100 m square split into 20 x 20 cells,
/// 8 x 8 arrays, 16 x 64 OFDM frames at 24 GHz / 200 MHz.
/// dB-valued quantities are kept exactly as entered; the linear accessors
/// below are the only conversion points.
struct ScenarioConfig
{
  double transmit_power_w = 1.0;
  double transmit_gain = 1.0;
  double area_side_m = 100.0;
  int uav_count = 16;
  double noise_density_dbm_per_hz = -174.0;
  double ground_rcs_dbsm = -30.0;
  double target_rcs_dbsm = 10.0;
  int symbols = 16;
  int subcarriers = 64;
  int array_side = 8;
  double carrier_frequency_hz = 24e9;
  double bandwidth_hz = 200e6;
  double cp_duration_s = 2.3e-6;
  int grid_side = 20;
  double doppler_hz = 0.0;

  /// Empty means "derive from coverage" (the lowest altitude whose footprint
  /// inscribes the UAV's whole block).
  std::optional<double> altitude_m;
  deployment_layout layout = deployment_layout::tiled;

  beamformer_kind beamformer = beamformer_kind::capon;
  double capon_loading = 1e-2;
  int ls_iterations = 10;
  fusion_kind fusion = fusion_kind::average;

  int trials = 1000;
  std::uint64_t master_seed = 1;
  std::vector<int> deltas{0};
  bool fast_path = true;
  /// 0 selects std::thread::hardware_concurrency().
  int threads = 0;

  double wavelength_m() const { return speed_of_light / carrier_frequency_hz; }
  double subcarrier_spacing_hz() const { return bandwidth_hz / subcarriers; }
  double symbol_duration_s() const { return 1.0 / subcarrier_spacing_hz() + cp_duration_s; }
  double cell_size_m() const { return area_side_m / grid_side; }
  double noise_density_w_per_hz() const { return dbm_to_watts(noise_density_dbm_per_hz); }
  double ground_rcs_m2() const { return dbsm_to_m2(ground_rcs_dbsm); }
  double target_rcs_m2() const { return dbsm_to_m2(target_rcs_dbsm); }
  int uavs_per_side() const { return static_cast<int>(std::lround(std::sqrt(static_cast<double>(uav_count)))); }

  /// Throws config_error naming the first offending field.
  void validate() const;
};

namespace detail
{
inline void require(bool ok, const char* field, const std::string& what)
{
  if (!ok)
    throw config_error(field, what);
}

inline bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }
} // namespace detail

inline void ScenarioConfig::validate() const
{
  using detail::positive_finite;
  using detail::require;

  require(positive_finite(transmit_power_w), "scenario.transmit_power_w", "must be > 0");
  require(positive_finite(transmit_gain), "scenario.transmit_gain", "must be > 0");
  require(positive_finite(area_side_m), "scenario.area_side_m", "must be > 0");
  require(uav_count > 0, "scenario.uav_count", "must be a positive integer");
  const int side = uavs_per_side();
  require(side * side == uav_count, "scenario.uav_count", "U = " + std::to_string(uav_count) + " is not a perfect square");
  require(std::isfinite(noise_density_dbm_per_hz), "scenario.noise_density_dbm_per_hz", "must be finite");
  require(std::isfinite(ground_rcs_dbsm), "scenario.ground_rcs_dbsm", "must be finite");
  require(std::isfinite(target_rcs_dbsm), "scenario.target_rcs_dbsm", "must be finite");
  require(ground_rcs_dbsm < target_rcs_dbsm, "scenario.ground_rcs_dbsm", "ground RCS must be smaller than target RCS");
  require(symbols > 0, "ofdm.symbols", "must be a positive integer");
  require(subcarriers > 0, "ofdm.subcarriers", "must be a positive integer");
  require(array_side >= 2, "array.side", "must be >= 2");
  require(positive_finite(carrier_frequency_hz), "ofdm.carrier_frequency_hz", "must be > 0");
  require(positive_finite(bandwidth_hz), "ofdm.bandwidth_hz", "must be > 0");
  require(positive_finite(cp_duration_s), "ofdm.cp_duration_s", "must be > 0");
  require(grid_side > 0, "scenario.grid_side", "must be a positive integer");
  require(std::isfinite(doppler_hz), "ofdm.doppler_hz", "must be finite");
  if (layout == deployment_layout::tiled)
    require(grid_side % side == 0, "scenario.grid_side",
            "sqrt(U) = " + std::to_string(side) + " does not divide L = " + std::to_string(grid_side));
  if (altitude_m)
    require(positive_finite(*altitude_m), "scenario.altitude_m", "must be > 0 or 'auto'");
  require(positive_finite(capon_loading), "beamformer.capon_loading", "must be > 0");
  require(ls_iterations >= 0, "beamformer.ls_iterations", "must be >= 0");
  require(trials > 0, "sim.trials", "must be a positive integer");
  require(!deltas.empty(), "sim.deltas", "at least one delta is required");
  for (int delta : deltas)
    require(delta >= 0, "sim.deltas", "deltas must be >= 0");
  require(threads >= 0, "sim.threads", "must be >= 0");
}

} // namespace uavsense
