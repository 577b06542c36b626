#pragma once

#include "uavsense/array.hpp"
#include "uavsense/config.hpp"
#include "uavsense/geometry.hpp"
#include "uavsense/ofdm.hpp"
#include "uavsense/parallel.hpp"
#include "uavsense/random.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace uavsense
{

struct RcsEstimate
{
  int cell = 0;
  double value = 0.0;
  int listener = 0;
  int transmitter = 0;
};

/// Ground reflection with everything but its amplitude scale and random
/// phase folded in: unit_coefficient = b(sigma = 1 m^2) * chi * K.
struct GroundTerm
{
  int cell = 0;
  cplx unit_coefficient;
};

/// One (transmitter, listener, intended cell) estimation job. Geometry-only,
/// so it is shared by every trial.
struct SensingTask
{
  int transmitter = 0;
  int listener = 0;
  int cell = 0;
  double d1 = 0.0; ///< transmitter -> cell centre
  double d2 = 0.0; ///< cell centre -> listener
  double delay_s = 0.0;
  double noise_variance = 0.0; ///< per sample, after beamforming
  std::vector<GroundTerm> ground;
};

/// Per-trial random state shared by every estimate in the trial.
struct TrialState
{
  std::uint64_t trial = 0;
  Vec3 target;
  std::vector<bool> target_illuminated; ///< delta_u per transmitter
};

/// Geometry, cell sets, receive beamformers and the precomputed sensing
/// jobs of one configuration. Immutable after build; trials only read it.
class Scenario
{
public:
  explicit Scenario(ScenarioConfig config) : config_(std::move(config)), grid_(build_grid(config_))
  {
    config_.validate();
    deployment_ = deploy_uavs(config_, grid_);
    ofdm_ = OfdmParams::from(config_);
    for (const Vec3& uav : deployment_.positions)
      sets_.push_back(classify_cells(uav, grid_, config_.array_side));

    intended_by_.assign(static_cast<std::size_t>(uav_count()) * grid_.cell_count(), false);
    for (int u = 0; u < uav_count(); ++u)
      for (int p : sets_[static_cast<std::size_t>(u)].intended)
        intended_by_[slot(u, p)] = true;

    design_beamformers();
    build_tasks();
  }

  const ScenarioConfig& config() const noexcept { return config_; }
  const CellGrid& grid() const noexcept { return grid_; }
  const UavDeployment& deployment() const noexcept { return deployment_; }
  const OfdmParams& ofdm() const noexcept { return ofdm_; }
  const CellSets& cell_sets(int uav) const { return sets_.at(static_cast<std::size_t>(uav)); }
  const std::vector<SensingTask>& tasks() const noexcept { return tasks_; }
  int uav_count() const noexcept { return deployment_.count(); }
  const Vec3& uav(int u) const { return deployment_.positions.at(static_cast<std::size_t>(u)); }

  /// True when `cell` belongs to the intended set of `uav`.
  bool is_intended(int uav, int cell) const { return intended_by_[slot(uav, cell)]; }

  /// Receive beamformer of `listener` steered at `cell`; designed for every pair a task needs.
  const BeamformerWeights& beamformer(int listener, int cell) const
  {
    const auto& w = beamformers_[slot(listener, cell)];
    if (!w)
      throw std::out_of_range("Scenario::beamformer: no design for this listener/cell pair");
    return *w;
  }

  /// Same geometry and beamformers with a different ground RCS; the
  /// precomputed jobs are RCS-independent.
  Scenario with_ground_rcs(double ground_rcs_dbsm) const
  {
    Scenario copy = *this;
    copy.config_.ground_rcs_dbsm = ground_rcs_dbsm;
    copy.config_.validate();
    return copy;
  }

  double propagation_delay(double d1, double d2) const { return (d1 + d2) / speed_of_light; }

  /// Draws the trial's target and illumination indicators.
  TrialState trial_state(std::uint64_t trial) const
  {
    TrialState state;
    state.trial = trial;
    auto rng = trial_stream(config_.master_seed, stream_tag::target, trial);
    state.target.x = rng.uniform(0.0, config_.area_side_m);
    state.target.y = rng.uniform(0.0, config_.area_side_m);
    for (int u = 0; u < uav_count(); ++u)
      state.target_illuminated.push_back(inside_footprint(uav(u), state.target, config_.array_side));
    return state;
  }

  /// zeta of the reflection from `cell` (the target uses cell = cell_count()) for one
  /// (transmitter, listener) frame of one trial.
  double reflection_phase(std::uint64_t trial, int tx, int listener, int cell) const
  {
    auto rng = trial_stream(config_.master_seed, stream_tag::reflection_phase, trial,
                            {static_cast<std::uint64_t>(tx), static_cast<std::uint64_t>(listener),
                             static_cast<std::uint64_t>(cell)});
    return two_pi * rng.uniform();
  }

  int target_phase_id() const noexcept { return grid_.cell_count(); }

  CounterRng noise_stream(std::uint64_t trial, const SensingTask& task) const
  {
    return trial_stream(config_.master_seed, stream_tag::noise, trial,
                        {static_cast<std::uint64_t>(task.transmitter), static_cast<std::uint64_t>(task.listener),
                         static_cast<std::uint64_t>(task.cell)});
  }

  CounterRng tx_data_stream(std::uint64_t trial, int tx) const
  {
    return trial_stream(config_.master_seed, stream_tag::tx_data, trial, {static_cast<std::uint64_t>(tx)});
  }

private:
  std::size_t slot(int uav, int cell) const
  {
    return static_cast<std::size_t>(uav) * static_cast<std::size_t>(grid_.cell_count()) + static_cast<std::size_t>(cell);
  }

  /// Listener u' senses cell p for every transmitter u != u' with p in P_u,
  /// except cells of its own P_u' (it transmits while those are illuminated).
  bool listener_senses(int listener, int cell) const
  {
    if (is_intended(listener, cell))
      return false;
    for (int u = 0; u < uav_count(); ++u)
      if (u != listener && is_intended(u, cell))
        return true;
    return false;
  }

  void design_beamformers()
  {
    beamformers_.assign(static_cast<std::size_t>(uav_count()) * grid_.cell_count(), std::nullopt);
    std::vector<std::pair<int, int>> needed;
    for (int listener = 0; listener < uav_count(); ++listener)
      for (int cell = 0; cell < grid_.cell_count(); ++cell)
        if (listener_senses(listener, cell))
          needed.emplace_back(listener, cell);

    parallel_for(needed.size(), config_.threads, [&](std::size_t i) {
      const auto [listener, cell] = needed[i];
      beamformers_[slot(listener, cell)] = design_beamformer(aoa(uav(listener), grid_.center(cell)), config_);
    });
  }

  void build_tasks()
  {
    const double noise_psd = config_.noise_density_w_per_hz() * config_.bandwidth_hz;
    for (int tx = 0; tx < uav_count(); ++tx)
      for (int listener = 0; listener < uav_count(); ++listener)
      {
        if (listener == tx)
          continue;
        for (int cell : sets_[static_cast<std::size_t>(tx)].intended)
        {
          if (is_intended(listener, cell))
            continue;
          SensingTask task;
          task.transmitter = tx;
          task.listener = listener;
          task.cell = cell;
          std::tie(task.d1, task.d2) = path_distances(uav(tx), grid_.center(cell), uav(listener));
          task.delay_s = propagation_delay(task.d1, task.d2);
          task.noise_variance = noise_psd * beamformer(listener, cell).weights.squaredNorm();
          tasks_.push_back(std::move(task));
        }
      }

    // Steering vectors towards every illuminated cell, one listener at a time.
    parallel_for(static_cast<std::size_t>(uav_count()), config_.threads, [&](std::size_t l) {
      const int listener = static_cast<int>(l);
      std::vector<std::optional<ComplexVector>> steering(static_cast<std::size_t>(grid_.cell_count()));
      auto steer = [&](int cell) -> const ComplexVector& {
        auto& g = steering[static_cast<std::size_t>(cell)];
        if (!g)
          g = steering_vector(aoa(uav(listener), grid_.center(cell)), config_.array_side);
        return *g;
      };
      for (auto& task : tasks_)
      {
        if (task.listener != listener)
          continue;
        const auto& w = beamformer(listener, task.cell).weights;
        for (int q : sets_[static_cast<std::size_t>(task.transmitter)].illuminated)
        {
          const auto [d1, d2] = path_distances(uav(task.transmitter), grid_.center(q), uav(listener));
          const double b = reflection_amplitude(config_, 1.0, d1, d2);
          const cplx chi = beam_gain(w, steer(q));
          const cplx K = matched_kernel(propagation_delay(d1, d2), config_.doppler_hz, task.delay_s,
                                        config_.doppler_hz, ofdm_);
          task.ground.push_back({q, b * chi * K});
        }
      }
    });
  }

  ScenarioConfig config_;
  CellGrid grid_;
  UavDeployment deployment_;
  OfdmParams ofdm_;
  std::vector<CellSets> sets_;
  std::vector<bool> intended_by_;
  std::vector<std::optional<BeamformerWeights>> beamformers_;
  std::vector<SensingTask> tasks_;
};

/// Every reflection reaching `listener` while `tx` illuminates, as seen
/// through the beamformer steered at `cell`: one per illuminated cell with
/// the ground RCS, plus the target when it lies in tx's footprint.
inline ReflectionSet build_reflections(const Scenario& scenario, int tx, int listener, int cell, const TrialState& trial)
{
  if (tx == listener)
    throw std::invalid_argument("build_reflections: a transmitter never listens to its own illumination");
  const auto& config = scenario.config();
  const auto& grid = scenario.grid();
  const auto& w = scenario.beamformer(listener, cell).weights;
  const Vec3& tx_pos = scenario.uav(tx);
  const Vec3& rx_pos = scenario.uav(listener);

  auto reflection = [&](const Vec3& point, double rcs, int phase_id) {
    const auto [d1, d2] = path_distances(tx_pos, point, rx_pos);
    ReflectionComponent r;
    r.amplitude = reflection_amplitude(config, rcs, d1, d2);
    r.beam_gain = beam_gain(w, steering_vector(aoa(rx_pos, point), config.array_side));
    r.delay_s = scenario.propagation_delay(d1, d2);
    r.doppler_hz = config.doppler_hz;
    r.phase = scenario.reflection_phase(trial.trial, tx, listener, phase_id);
    return r;
  };

  ReflectionSet set;
  for (int q : scenario.cell_sets(tx).illuminated)
    set.push_back(reflection(grid.center(q), config.ground_rcs_m2(), q));
  if (trial.target_illuminated.at(static_cast<std::size_t>(tx)))
    set.push_back(reflection(trial.target, config.target_rcs_m2(), scenario.target_phase_id()));
  return set;
}

/// Matched-point value from the reflection set in closed form:
/// sum_r b chi e^{-j zeta} K_r plus one equivalent noise draw of variance NM sigma_z^2.
inline double fast_matched_value(const ReflectionSet& reflections, double matched_delay_s, double matched_doppler_hz,
                                 const OfdmParams& params, double noise_variance, CounterRng noise)
{
  const double nm = static_cast<double>(params.symbols) * params.subcarriers;
  cplx sum{};
  for (const auto& r : reflections)
    sum += r.coefficient() * matched_kernel(r.delay_s, r.doppler_hz, matched_delay_s, matched_doppler_hz, params);
  if (noise_variance > 0.0)
    sum += noise.complex_normal(nm * noise_variance);
  return std::norm(sum) / nm;
}

/// Fast path for one task: closed-form kernels over the reflection set.
inline RcsEstimate fast_cell_estimate(const Scenario& scenario, const SensingTask& task, const TrialState& trial,
                                      bool noisy = true)
{
  const auto reflections = build_reflections(scenario, task.transmitter, task.listener, task.cell, trial);
  const double value = fast_matched_value(reflections, task.delay_s, scenario.config().doppler_hz, scenario.ofdm(),
                                          noisy ? task.noise_variance : 0.0, scenario.noise_stream(trial.trial, task));
  return {task.cell, estimate_rcs(value, scenario.config(), task.d1, task.d2), task.listener, task.transmitter};
}

/// Reference path for one task: synthesise the frame, strip the data, evaluate the matched point.
inline RcsEstimate reference_cell_estimate(const Scenario& scenario, const SensingTask& task, const TrialState& trial,
                                           const Frame& tx_frame, bool noisy = true)
{
  const auto reflections = build_reflections(scenario, task.transmitter, task.listener, task.cell, trial);
  const Frame rx = synth_rx_frame(tx_frame, reflections, scenario.ofdm(), noisy ? task.noise_variance : 0.0,
                                  scenario.noise_stream(trial.trial, task));
  const Frame F = remove_data(rx, tx_frame);
  const double value = matched_point_value(F, task.delay_s, scenario.config().doppler_hz, scenario.ofdm());
  return {task.cell, estimate_rcs(value, scenario.config(), task.d1, task.d2), task.listener, task.transmitter};
}

} // namespace uavsense
