#pragma once

#include "uavsense/fusion.hpp"
#include "uavsense/parallel.hpp"
#include "uavsense/sensing.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace uavsense
{

enum class estimation_path
{
  fast,
  reference
};

struct SimulationOptions
{
  estimation_path path = estimation_path::fast;
  bool noise = true;
};

inline SimulationOptions simulation_options(const ScenarioConfig& config)
{
  return {config.fast_path ? estimation_path::fast : estimation_path::reference, true};
}

namespace detail
{
/// Running per-cell mean for one listener's map.
struct MapAccumulator
{
  std::vector<double> sum;
  std::vector<int> count;

  explicit MapAccumulator(int cells) : sum(static_cast<std::size_t>(cells), 0.0), count(static_cast<std::size_t>(cells), 0) {}

  void add(int cell, double v)
  {
    sum[static_cast<std::size_t>(cell)] += v;
    ++count[static_cast<std::size_t>(cell)];
  }

  LocalRcsMap finish(int owner) const
  {
    LocalRcsMap map{owner, RcsValues(sum.size())};
    for (std::size_t c = 0; c < sum.size(); ++c)
      if (count[c] > 0)
        map.values[c] = sum[c] / count[c];
    return map;
  }
};

/// Fast path over the precomputed tasks; per-task sums match fast_cell_estimate.
inline void accumulate_fast(const Scenario& scenario, const TrialState& trial, bool noisy,
                            std::vector<MapAccumulator>& maps)
{
  const auto& config = scenario.config();
  const auto& params = scenario.ofdm();
  const double nm = static_cast<double>(params.symbols) * params.subcarriers;
  const double ground_scale = std::sqrt(config.ground_rcs_m2());
  const double target_rcs = config.target_rcs_m2();

  std::vector<std::optional<ComplexVector>> target_steering(static_cast<std::size_t>(scenario.uav_count()));
  std::vector<cplx> phasors;
  int group_tx = -1;
  int group_listener = -1;
  cplx target_phasor{};
  double target_d1 = 0.0;
  double target_d2 = 0.0;

  for (const SensingTask& task : scenario.tasks())
  {
    const bool target_in = trial.target_illuminated[static_cast<std::size_t>(task.transmitter)];
    if (task.transmitter != group_tx || task.listener != group_listener)
    {
      group_tx = task.transmitter;
      group_listener = task.listener;
      const auto& illuminated = scenario.cell_sets(group_tx).illuminated;
      phasors.resize(illuminated.size());
      for (std::size_t i = 0; i < illuminated.size(); ++i)
        phasors[i] = std::polar(1.0, -scenario.reflection_phase(trial.trial, group_tx, group_listener, illuminated[i]));
      if (target_in)
      {
        target_phasor = std::polar(1.0, -scenario.reflection_phase(trial.trial, group_tx, group_listener,
                                                                   scenario.target_phase_id()));
        std::tie(target_d1, target_d2) =
            path_distances(scenario.uav(group_tx), trial.target, scenario.uav(group_listener));
      }
    }

    cplx ground{};
    for (std::size_t i = 0; i < task.ground.size(); ++i)
      ground += task.ground[i].unit_coefficient * phasors[i];
    cplx sum = ground_scale * ground;

    if (target_in)
    {
      auto& g = target_steering[static_cast<std::size_t>(task.listener)];
      if (!g)
        g = steering_vector(aoa(scenario.uav(task.listener), trial.target), config.array_side);
      const double b = reflection_amplitude(config, target_rcs, target_d1, target_d2);
      const cplx chi = beam_gain(scenario.beamformer(task.listener, task.cell).weights, *g);
      const cplx K = matched_kernel(scenario.propagation_delay(target_d1, target_d2), config.doppler_hz, task.delay_s,
                                    config.doppler_hz, params);
      sum += b * chi * target_phasor * K;
    }

    if (noisy && task.noise_variance > 0.0)
      sum += scenario.noise_stream(trial.trial, task).complex_normal(nm * task.noise_variance);

    const double value = std::norm(sum) / nm;
    maps[static_cast<std::size_t>(task.listener)].add(task.cell, estimate_rcs(value, config, task.d1, task.d2));
  }
}

inline void accumulate_reference(const Scenario& scenario, const TrialState& trial, bool noisy,
                                 std::vector<MapAccumulator>& maps)
{
  std::vector<std::optional<Frame>> tx_frames(static_cast<std::size_t>(scenario.uav_count()));
  for (const SensingTask& task : scenario.tasks())
  {
    auto& frame = tx_frames[static_cast<std::size_t>(task.transmitter)];
    if (!frame)
      frame = synth_tx_frame(scenario.ofdm(), scenario.tx_data_stream(trial.trial, task.transmitter));
    const RcsEstimate est = reference_cell_estimate(scenario, task, trial, *frame, noisy);
    maps[static_cast<std::size_t>(task.listener)].add(est.cell, est.value);
  }
}
} // namespace detail

/// Local RCS maps of every UAV for one trial.
/// Map u never holds estimates for cells of u's own intended set, and cells
/// no transmitter senses stay empty.
inline std::vector<LocalRcsMap> simulate_local_maps(const Scenario& scenario, const TrialState& trial,
                                                    const SimulationOptions& options = {})
{
  std::vector<detail::MapAccumulator> acc(static_cast<std::size_t>(scenario.uav_count()),
                                          detail::MapAccumulator(scenario.grid().cell_count()));
  if (options.path == estimation_path::fast)
    detail::accumulate_fast(scenario, trial, options.noise, acc);
  else
    detail::accumulate_reference(scenario, trial, options.noise, acc);

  std::vector<LocalRcsMap> maps;
  maps.reserve(acc.size());
  for (std::size_t u = 0; u < acc.size(); ++u)
    maps.push_back(acc[u].finish(static_cast<int>(u)));
  return maps;
}

struct TrialOutcome
{
  std::uint64_t trial = 0;
  Vec3 target;
  DetectionResult detection;
};

inline TrialOutcome evaluate_trial(const Scenario& scenario, const TrialState& trial,
                                   const std::vector<LocalRcsMap>& maps, fusion_kind fusion)
{
  const FusedMap fused = fuse(maps, fusion);
  if (!has_estimates(fused))
    return {trial.trial, trial.target, {std::nullopt, scenario.grid().cell_of(trial.target.x, trial.target.y)}};
  return {trial.trial, trial.target, score_detection(scenario.grid(), detect(fused), trial.target)};
}

/// One full protocol round: draw the target, sense, fuse, detect, score.
inline TrialOutcome run_trial(const Scenario& scenario, std::uint64_t trial, const SimulationOptions& options = {})
{
  const TrialState state = scenario.trial_state(trial);
  return evaluate_trial(scenario, state, simulate_local_maps(scenario, state, options), scenario.config().fusion);
}

/// Hit counts per delta with Wald 95% half-widths.
struct DetectionStats
{
  std::vector<int> deltas;
  std::vector<long> hits;
  long trials = 0;

  double probability(std::size_t i) const { return static_cast<double>(hits.at(i)) / static_cast<double>(trials); }

  double ci95_halfwidth(std::size_t i) const
  {
    const double p = probability(i);
    return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  }

  std::size_t index_of(int delta) const
  {
    for (std::size_t i = 0; i < deltas.size(); ++i)
      if (deltas[i] == delta)
        return i;
    throw std::out_of_range("DetectionStats: delta not tracked");
  }

  double probability_at(int delta) const { return probability(index_of(delta)); }
};

inline DetectionStats aggregate(const std::vector<TrialOutcome>& outcomes, const std::vector<int>& deltas)
{
  DetectionStats stats{deltas, std::vector<long>(deltas.size(), 0), static_cast<long>(outcomes.size())};
  for (const auto& o : outcomes)
    for (std::size_t i = 0; i < deltas.size(); ++i)
      if (o.detection.hit(deltas[i]))
        ++stats.hits[i];
  return stats;
}

/// Trial outcomes for each fusion rule, sharing the sensing of every trial.
/// outcomes[f][t] belongs to fusions[f] and trial t; independent of thread count.
inline std::vector<std::vector<TrialOutcome>> run_trials(const Scenario& scenario, int trials,
                                                         const std::vector<fusion_kind>& fusions,
                                                         const SimulationOptions& options = {}, int threads = -1)
{
  if (trials < 1)
    throw std::invalid_argument("run_trials: trials must be >= 1");
  std::vector<std::vector<TrialOutcome>> outcomes(fusions.size(),
                                                  std::vector<TrialOutcome>(static_cast<std::size_t>(trials)));
  parallel_for(static_cast<std::size_t>(trials), threads < 0 ? scenario.config().threads : threads, [&](std::size_t t) {
    const TrialState state = scenario.trial_state(t);
    const auto maps = simulate_local_maps(scenario, state, options);
    for (std::size_t f = 0; f < fusions.size(); ++f)
      outcomes[f][t] = evaluate_trial(scenario, state, maps, fusions[f]);
  });
  return outcomes;
}

/// Monte Carlo detection statistics with the configured trials, fusion and deltas.
inline DetectionStats run_monte_carlo(const Scenario& scenario, const SimulationOptions& options = {}, int threads = -1)
{
  const auto& config = scenario.config();
  const auto outcomes = run_trials(scenario, config.trials, {config.fusion}, options, threads);
  return aggregate(outcomes.front(), config.deltas);
}

} // namespace uavsense
