#pragma once

#include "uavsense/units.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>

namespace uavsense
{

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream key from a parent key and a tuple of
/// counters. Order-sensitive; no shared state, so any schedule reproduces
/// the same keys.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::initializer_list<std::uint64_t> path) noexcept
{
  std::uint64_t key = mix64(parent);
  for (std::uint64_t part : path)
    key = mix64(key ^ mix64(part + 0x632be59bd9b4e019ULL));
  return key;
}

/// Purpose tags for the substreams of a trial.
enum class stream_tag : std::uint64_t
{
  target = 1,
  tx_data = 2,
  reflection_phase = 3,
  noise = 4,
};

/// Counter-based random stream: the i-th draw depends only on (key, i).
class CounterRng
{
public:
  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t next_u64() noexcept { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; one pair per call, the sine half is discarded.
  double normal() noexcept
  {
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance) noexcept
  {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-variance * std::log(u1));
    return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
  }

  std::uint64_t key() const noexcept { return key_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stream for one purpose within one trial; `ids` further split it.
inline CounterRng trial_stream(std::uint64_t master_seed, stream_tag tag, std::uint64_t trial,
                               std::initializer_list<std::uint64_t> ids = {})
{
  std::uint64_t key = derive_key(master_seed, {static_cast<std::uint64_t>(tag), trial});
  for (std::uint64_t id : ids)
    key = derive_key(key, {id});
  return CounterRng(key);
}

} // namespace uavsense
