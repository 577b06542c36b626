#pragma once

#include "uavsense/array.hpp"
#include "uavsense/engine.hpp"
#include "uavsense/ofdm.hpp"
#include "uavsense/random.hpp"
#include "uavsense/sensing.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace uavsense
{

struct SelftestResult
{
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace selftest
{
inline std::string sci(double v)
{
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

inline Frame random_frame(CounterRng& rng, int rows, int cols)
{
  Frame F(rows, cols);
  for (int k = 0; k < rows; ++k)
    for (int l = 0; l < cols; ++l)
      F(k, l) = rng.complex_normal(1.0);
  return F;
}

/// Periodogram by the literal double sum.
inline double direct_periodogram(const Frame& F, int n, int m, int padded_symbols, int padded_subcarriers)
{
  cplx acc{};
  for (int k = 0; k < F.rows(); ++k)
    for (int l = 0; l < F.cols(); ++l)
      acc += F(k, l) * std::polar(1.0, two_pi * (static_cast<double>(l) * m / padded_subcarriers -
                                                 static_cast<double>(k) * n / padded_symbols));
  return std::norm(acc) / (static_cast<double>(F.rows()) * F.cols());
}

inline SelftestResult dft_equivalence()
{
  CounterRng rng(derive_key(0x5e1f, {1}));
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial)
  {
    const Frame F = random_frame(rng, 8, 8);
    const auto P = periodogram_grid(F, 16, 16);
    Eigen::MatrixXd ref(16, 16);
    for (int n = 0; n < 16; ++n)
      for (int m = 0; m < 16; ++m)
        ref(n, m) = direct_periodogram(F, n, m, 16, 16);
    worst = std::max(worst, (P - ref).cwiseAbs().maxCoeff() / ref.maxCoeff());
  }
  return {"dft_equivalence", worst < 1e-9, "max relative error " + sci(worst)};
}

inline SelftestResult peak_landing()
{
  OfdmParams params{8, 8, 1.0, 0.0};
  const int Np = 16;
  const int Mp = 16;
  CounterRng rng(derive_key(0x5e1f, {2}));
  int misses = 0;
  for (int n_hat = 0; n_hat < Np; n_hat += 3)
    for (int m_hat = 0; m_hat < Mp; m_hat += 5)
    {
      ReflectionComponent r;
      r.amplitude = 1.0;
      r.delay_s = static_cast<double>(m_hat) / Mp / params.subcarrier_spacing_hz;
      r.doppler_hz = static_cast<double>(n_hat) / Np / params.symbol_duration_s();
      r.phase = two_pi * rng.uniform();
      const Frame tx = synth_tx_frame(params, CounterRng(rng.next_u64()));
      const Frame F = remove_data(synth_rx_frame(tx, {r}, params, 0.0, CounterRng(0)), tx);
      Eigen::Index n = 0;
      Eigen::Index m = 0;
      periodogram_grid(F, Np, Mp).maxCoeff(&n, &m);
      if (n != n_hat || m != m_hat)
        ++misses;
    }
  return {"peak_landing", misses == 0, std::to_string(misses) + " misplaced peaks"};
}

inline AoA random_aoa(CounterRng& rng) { return {rng.uniform(0.0, pi / 2.0 - 1e-3), rng.uniform(0.0, two_pi)}; }

inline SelftestResult capon_distortionless()
{
  CounterRng rng(derive_key(0x5e1f, {3}));
  double worst = 0.0;
  for (int i = 0; i < 200; ++i)
  {
    const AoA a = random_aoa(rng);
    const auto w = capon_beamformer(a, 8, 1e-2);
    worst = std::max(worst, std::abs(beam_gain(w.weights, steering_vector(a, 8)) - 1.0));
  }
  return {"capon_distortionless", worst < 1e-12, "max |w^H g - 1| = " + sci(worst)};
}

inline SelftestResult ls_contract()
{
  CounterRng rng(derive_key(0x5e1f, {4}));
  int failures = 0;
  for (int n : {4, 8})
    for (int i = 0; i < 5; ++i)
    {
      const AoAMesh mesh = aoa_mesh(random_aoa(rng), n);
      const auto w = ls_beamformer(mesh, n);
      const ComplexMatrix G = steering_matrix(mesh.points, n);
      const ComplexVector baseline = G.col(0) / static_cast<double>(n);
      const bool ok = std::abs(w.weights.norm() - 1.0) <= 1e-9 &&
                      ls_residual(G, mesh.desired, w.weights) <= ls_residual(G, mesh.desired, baseline) * (1.0 + 1e-12);
      failures += ok ? 0 : 1;
    }
  return {"ls_contract", failures == 0, std::to_string(failures) + " designs violate norm or baseline"};
}

inline SelftestResult rcs_roundtrip()
{
  const ScenarioConfig config;
  const auto params = OfdmParams::from(config);
  const double d1 = 170.0;
  const double d2 = 185.0;
  ReflectionComponent r;
  r.amplitude = reflection_amplitude(config, config.target_rcs_m2(), d1, d2);
  r.delay_s = (d1 + d2) / speed_of_light;
  r.phase = 1.234;
  const Frame tx = synth_tx_frame(params, CounterRng(7));
  const Frame F = remove_data(synth_rx_frame(tx, {r}, params, 0.0, CounterRng(0)), tx);
  const double sigma = estimate_rcs(matched_point_value(F, r.delay_s, 0.0, params), config, d1, d2);
  const double rel = std::abs(sigma - config.target_rcs_m2()) / config.target_rcs_m2();
  return {"rcs_roundtrip", rel < 1e-6, "relative error " + sci(rel)};
}

inline SelftestResult fast_reference_equivalence()
{
  ScenarioConfig config;
  config.uav_count = 4;
  config.grid_side = 4;
  config.area_side_m = 8.0;
  config.array_side = 4;
  config.threads = 1;
  const Scenario scenario(config);
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 3; ++t)
  {
    const TrialState state = scenario.trial_state(t);
    const auto fast = fuse(simulate_local_maps(scenario, state, {estimation_path::fast, false}), config.fusion);
    const auto ref = fuse(simulate_local_maps(scenario, state, {estimation_path::reference, false}), config.fusion);
    for (std::size_t c = 0; c < fast.values.size(); ++c)
    {
      if (fast.values[c].has_value() != ref.values[c].has_value())
        return {"fast_reference_equivalence", false, "estimate coverage differs"};
      if (fast.values[c])
        worst = std::max(worst, std::abs(*fast.values[c] - *ref.values[c]) / std::max(std::abs(*ref.values[c]), 1e-300));
    }
  }
  return {"fast_reference_equivalence", worst < 1e-9, "max relative error " + sci(worst)};
}
} // namespace selftest

/// Built-in oracle suites; each returns its own pass/fail.
inline std::vector<SelftestResult> run_selftests()
{
  const std::vector<std::function<SelftestResult()>> suites{
      selftest::dft_equivalence,     selftest::peak_landing,  selftest::capon_distortionless,
      selftest::ls_contract,         selftest::rcs_roundtrip, selftest::fast_reference_equivalence,
  };
  std::vector<SelftestResult> results;
  for (const auto& suite : suites)
  {
    try
    {
      results.push_back(suite());
    }
    catch (const std::exception& e)
    {
      results.push_back({"suite", false, std::string("threw: ") + e.what()});
    }
  }
  return results;
}

} // namespace uavsense
