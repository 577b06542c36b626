#pragma once

#include "uavsense/config.hpp"
#include "uavsense/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace uavsense
{

/// Per-cell RCS estimates; std::nullopt marks a cell with no estimate.
using RcsValues = std::vector<std::optional<double>>;

struct LocalRcsMap
{
  int owner = 0;
  RcsValues values;
};

struct FusedMap
{
  RcsValues values;
  fusion_kind kind = fusion_kind::average;
};

/// Min-max normalisation over the finite entries; a constant map becomes all zeros.
inline LocalRcsMap normalize_map(const LocalRcsMap& map)
{
  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (const auto& v : map.values)
    if (v)
    {
      lo = any ? std::min(lo, *v) : *v;
      hi = any ? std::max(hi, *v) : *v;
      any = true;
    }

  LocalRcsMap out{map.owner, RcsValues(map.values.size())};
  const double range = hi - lo;
  for (std::size_t i = 0; i < map.values.size(); ++i)
    if (map.values[i])
      out.values[i] = range > 0.0 ? (*map.values[i] - lo) / range : 0.0;
  return out;
}

/// Per-cell mean over the maps that hold an estimate for that cell.
/// Sums are Neumaier-compensated.
inline FusedMap fuse(std::span<const LocalRcsMap> maps, fusion_kind kind)
{
  if (maps.empty())
    throw std::invalid_argument("fuse: at least one local map is required");
  const std::size_t cells = maps.front().values.size();
  for (const auto& m : maps)
    if (m.values.size() != cells)
      throw std::invalid_argument("fuse: local maps differ in size");

  std::vector<LocalRcsMap> normalized;
  if (kind == fusion_kind::prenorm_average)
  {
    normalized.reserve(maps.size());
    for (const auto& m : maps)
      normalized.push_back(normalize_map(m));
    maps = normalized;
  }

  FusedMap fused{RcsValues(cells), kind};
  for (std::size_t c = 0; c < cells; ++c)
  {
    double sum = 0.0;
    double compensation = 0.0;
    int count = 0;
    for (const auto& m : maps)
    {
      if (!m.values[c])
        continue;
      const double v = *m.values[c];
      const double t = sum + v;
      compensation += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
      sum = t;
      ++count;
    }
    if (count > 0)
      fused.values[c] = (sum + compensation) / count;
  }
  return fused;
}

/// Flat index of the largest finite cell; ties go to the smallest row-major index.
inline int detect(const FusedMap& fused)
{
  int best = -1;
  double best_value = 0.0;
  for (std::size_t i = 0; i < fused.values.size(); ++i)
    if (fused.values[i] && (best < 0 || *fused.values[i] > best_value))
    {
      best = static_cast<int>(i);
      best_value = *fused.values[i];
    }
  if (best < 0)
    throw std::runtime_error("detect: fused map holds no estimates");
  return best;
}

enum class hypothesis
{
  h0,
  h1
};

/// H1 iff ||target - cell centre||_inf <= d (1/2 + delta).
inline hypothesis hypothesis_test(const Vec3& target, const Vec3& cell_center, double cell_size, int delta)
{
  const double dist = std::max(std::abs(target.x - cell_center.x), std::abs(target.y - cell_center.y));
  return dist <= cell_size * (0.5 + delta) ? hypothesis::h1 : hypothesis::h0;
}

struct DetectionResult
{
  /// Empty when the fused map held no estimate at all (counted as a miss for every delta).
  std::optional<CellIndex> detected;
  CellIndex truth;
  /// Smallest delta for which the hypothesis test accepts the detected cell.
  int delta_star = std::numeric_limits<int>::max();

  bool hit(int delta) const noexcept { return delta_star <= delta; }
};

inline bool has_estimates(const FusedMap& fused)
{
  for (const auto& v : fused.values)
    if (v)
      return true;
  return false;
}

inline DetectionResult score_detection(const CellGrid& grid, int detected_flat, const Vec3& target)
{
  DetectionResult r;
  r.detected = grid.cell(detected_flat);
  r.truth = grid.cell_of(target.x, target.y);
  const Vec3 center = grid.center(*r.detected);
  const double dist = std::max(std::abs(target.x - center.x), std::abs(target.y - center.y));
  int delta = std::max(0, static_cast<int>(std::ceil(dist / grid.cell_size() - 0.5)));
  // Guard the ceil against rounding at exact borders.
  while (delta > 0 && hypothesis_test(target, center, grid.cell_size(), delta - 1) == hypothesis::h1)
    --delta;
  while (hypothesis_test(target, center, grid.cell_size(), delta) == hypothesis::h0)
    ++delta;
  r.delta_star = delta;
  return r;
}

} // namespace uavsense
