#pragma once

#include "uavsense/config.hpp"
#include "uavsense/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <utility>
#include <vector>

namespace uavsense
{

struct Vec3
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }
inline double horizontal_distance(const Vec3& a, const Vec3& b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Row `row` runs along x, column `col` along y.
struct CellIndex
{
  int row = 0;
  int col = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Elevation measured from the downward array boresight, azimuth from +x.
struct AoA
{
  double elevation = 0.0;
  double azimuth = 0.0;
};

/// L x L grid of square cells of side d covering [0, l]^2 at ground level.
class CellGrid
{
public:
  CellGrid(int side_count, double cell_size) : side_(side_count), cell_size_(cell_size)
  {
    if (side_count <= 0)
      throw std::invalid_argument("CellGrid: side count must be positive");
    if (!(cell_size > 0.0) || !std::isfinite(cell_size))
      throw std::invalid_argument("CellGrid: cell size must be positive");
  }

  int side() const noexcept { return side_; }
  int cell_count() const noexcept { return side_ * side_; }
  double cell_size() const noexcept { return cell_size_; }
  double extent() const noexcept { return side_ * cell_size_; }

  Vec3 center(CellIndex c) const { return {(c.row + 0.5) * cell_size_, (c.col + 0.5) * cell_size_, 0.0}; }
  Vec3 center(int flat) const { return center(cell(flat)); }

  int flat(CellIndex c) const noexcept { return c.row * side_ + c.col; }
  CellIndex cell(int flat) const noexcept { return {flat / side_, flat % side_}; }

  /// Cell containing a ground point; points on the far border clamp into the last cell.
  CellIndex cell_of(double x, double y) const
  {
    auto clamp = [this](double v) {
      return std::clamp(static_cast<int>(std::floor(v / cell_size_)), 0, side_ - 1);
    };
    return {clamp(x), clamp(y)};
  }

private:
  int side_;
  double cell_size_;
};

/// Rejects L <= 0 or l <= 0; d = l / L.
inline CellGrid build_grid(const ScenarioConfig& config)
{
  if (config.grid_side <= 0)
    throw config_error("scenario.grid_side", "must be a positive integer");
  if (!(config.area_side_m > 0.0))
    throw config_error("scenario.area_side_m", "must be > 0");
  return CellGrid(config.grid_side, config.cell_size_m());
}

/// Broadside half-power beamwidth of an n-element half-wavelength array,
/// 0.886 * 2 / n radians, used for both principal planes of the n x n UPA.
inline double hpbw(int array_side)
{
  if (array_side < 2)
    throw std::invalid_argument("hpbw: array side must be >= 2");
  return 0.886 * 2.0 / array_side;
}

/// Ground radius of the half-power footprint when illuminating straight down.
inline double footprint_radius(double altitude, int array_side) { return altitude * std::tan(hpbw(array_side) / 2.0); }

/// Lowest altitude whose footprint inscribes an axis-aligned square of side `span`.
inline double altitude_for_span(double span, int array_side)
{
  return span / (std::sqrt(2.0) * std::tan(hpbw(array_side) / 2.0));
}

/// Lowest altitude at which the inscribed square spans c cells of the configured size.
inline double derive_altitude(const ScenarioConfig& config, int cells_per_side)
{
  if (cells_per_side < 1)
    throw std::invalid_argument("derive_altitude: cells per side must be >= 1");
  return altitude_for_span(cells_per_side * config.cell_size_m(), config.array_side);
}

/// Block of cells assigned to one UAV in the tiled layout.
struct CellBlock
{
  int first_row = 0;
  int first_col = 0;
  int size = 0;

  bool contains(CellIndex c) const noexcept
  {
    return c.row >= first_row && c.row < first_row + size && c.col >= first_col && c.col < first_col + size;
  }
};

struct UavDeployment
{
  double altitude = 0.0;
  std::vector<Vec3> positions;
  /// Present for the tiled layout only.
  std::vector<CellBlock> blocks;

  int count() const noexcept { return static_cast<int>(positions.size()); }
};

/// UAVs are indexed row-major over the sqrt(U) x sqrt(U) layout, first index along x.
inline UavDeployment deploy_uavs(const ScenarioConfig& config, const CellGrid& grid)
{
  const int per_side = config.uavs_per_side();
  if (per_side * per_side != config.uav_count)
    throw config_error("scenario.uav_count", "U = " + std::to_string(config.uav_count) + " is not a perfect square");

  UavDeployment deployment;
  double span = 0.0;
  if (config.layout == deployment_layout::tiled)
  {
    if (grid.side() % per_side != 0)
      throw config_error("scenario.grid_side", "sqrt(U) = " + std::to_string(per_side) +
                                                   " does not divide L = " + std::to_string(grid.side()));
    const int block = grid.side() / per_side;
    span = block * grid.cell_size();
    for (int i = 0; i < per_side; ++i)
      for (int j = 0; j < per_side; ++j)
        deployment.blocks.push_back({i * block, j * block, block});
  }
  else
  {
    span = config.area_side_m / per_side;
  }

  deployment.altitude = config.altitude_m ? *config.altitude_m : altitude_for_span(span, config.array_side);
  for (int i = 0; i < per_side; ++i)
    for (int j = 0; j < per_side; ++j)
      deployment.positions.push_back({(i + 0.5) * span, (j + 0.5) * span, deployment.altitude});
  return deployment;
}

/// Ground-cell partitions for one illuminating UAV. Flat cell indices, ascending.
struct CellSets
{
  std::vector<int> intended; ///< P_u: cells wholly inside the footprint's inscribed square
  std::vector<int> clutter;  ///< P_u': remaining cells whose centre is inside the footprint
  std::vector<int> illuminated; ///< Q_u = P_u union P_u'
};

/// True when a ground point lies inside the UAV's half-power footprint circle.
inline bool inside_footprint(const Vec3& uav, const Vec3& point, int array_side)
{
  return horizontal_distance(uav, point) <= footprint_radius(uav.z, array_side);
}

inline CellSets classify_cells(const Vec3& uav, const CellGrid& grid, int array_side)
{
  const double radius = footprint_radius(uav.z, array_side);
  const double half_square = radius * std::sqrt(2.0) / 2.0;
  const double d = grid.cell_size();
  // Absorbs rounding when the square is sized to fit a block exactly.
  const double tol = 1e-9 * std::max(d, 1.0);

  CellSets sets;
  for (int flat = 0; flat < grid.cell_count(); ++flat)
  {
    const CellIndex c = grid.cell(flat);
    const double x0 = c.row * d;
    const double y0 = c.col * d;
    const bool in_square = x0 >= uav.x - half_square - tol && x0 + d <= uav.x + half_square + tol &&
                           y0 >= uav.y - half_square - tol && y0 + d <= uav.y + half_square + tol;
    if (in_square)
    {
      sets.intended.push_back(flat);
      sets.illuminated.push_back(flat);
    }
    else if (horizontal_distance(uav, grid.center(c)) <= radius)
    {
      sets.clutter.push_back(flat);
      sets.illuminated.push_back(flat);
    }
  }
  return sets;
}

/// Angle of arrival of a reflection from `point` at an array above it.
inline AoA aoa(const Vec3& observer, const Vec3& point)
{
  const double height = observer.z - point.z;
  if (!(height > 0.0))
    throw std::invalid_argument("aoa: point must lie below the observer");
  const double dx = point.x - observer.x;
  const double dy = point.y - observer.y;
  const double horizontal = std::hypot(dx, dy);
  AoA out;
  out.elevation = std::atan2(horizontal, height);
  if (horizontal > 0.0)
  {
    out.azimuth = std::atan2(dy, dx);
    if (out.azimuth < 0.0)
      out.azimuth += two_pi;
    if (out.azimuth >= two_pi)
      out.azimuth = 0.0;
  }
  return out;
}

/// Transmitter-to-point and point-to-receiver distances of a two-hop reflection.
inline std::pair<double, double> path_distances(const Vec3& tx, const Vec3& point, const Vec3& rx)
{
  return {norm(point - tx), norm(rx - point)};
}

inline int chebyshev_cell_distance(CellIndex a, CellIndex b)
{
  return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
}

} // namespace uavsense
