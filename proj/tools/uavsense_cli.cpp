#include "uavsense.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{

struct CommonArgs
{
  std::string config_path;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  std::string beamformer;
  std::string fusion;
  std::string fast_path;
  std::optional<int> threads;
  std::string deltas;
  std::vector<std::string> overrides;
  std::string preset;
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
  cmd->add_option("--config", args.config_path, "flat key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--trials", args.trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args.seed, "master seed");
  cmd->add_option("--out", args.out, "output file (default: stdout)");
  cmd->add_option("--format", args.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--beamformer", args.beamformer, "receive beamformer")->check(CLI::IsMember({"ls", "capon"}));
  cmd->add_option("--fusion", args.fusion, "fusion rule")->check(CLI::IsMember({"avg", "prenorm"}));
  cmd->add_option("--fast-path", args.fast_path, "closed-form matched point")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--threads", args.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--deltas", args.deltas, "comma-separated delta list, e.g. 0,1,2");
  cmd->add_option("--set", args.overrides, "override one key, e.g. --set scenario.grid_side=10");
}

uavsense::RunConfig resolve(const CommonArgs& args)
{
  using namespace uavsense;
  RunConfig config;
  if (!args.preset.empty())
    config.sweep = preset(args.preset);
  if (!args.config_path.empty())
    config = load_config(args.config_path, config);
  for (const auto& o : args.overrides)
    apply_override(config, o);
  if (args.trials)
    config.scenario.trials = *args.trials;
  if (args.seed)
    config.scenario.master_seed = *args.seed;
  if (!args.beamformer.empty())
    apply_setting(config, "beamformer.kind", args.beamformer);
  if (!args.fusion.empty())
    apply_setting(config, "fusion.kind", args.fusion);
  if (!args.fast_path.empty())
    apply_setting(config, "sim.fast_path", args.fast_path);
  if (args.threads)
    config.scenario.threads = *args.threads;
  if (!args.deltas.empty())
    apply_setting(config, "sim.deltas", args.deltas);
  config.scenario.validate();
  return config;
}

void emit(const CommonArgs& args, const uavsense::RunConfig& config, const std::vector<uavsense::SweepRow>& rows)
{
  if (!args.out.empty())
  {
    uavsense::write_results(args.out, args.format, config, rows);
    std::cerr << "wrote " << rows.size() << " rows to " << args.out << "\n";
  }
  else if (args.format == "json")
    std::cout << uavsense::manifest_json(config, rows).dump(2) << "\n";
  else
    uavsense::write_csv(std::cout, rows);
}

int run_command(const CommonArgs& args)
{
  auto config = resolve(args);
  config.sweep = {};
  config.sweep.fusions = {config.scenario.fusion};
  const auto rows = uavsense::sweep(config.sweep, config.scenario, uavsense::simulation_options(config.scenario));
  emit(args, config, rows);
  return 0;
}

int sweep_command(const CommonArgs& args)
{
  const auto config = resolve(args);
  if (config.sweep.param == uavsense::sweep_param::none)
    throw uavsense::config_error("sweep.param", "no sweep given; use --preset or set sweep.param and sweep.values");
  const auto rows = uavsense::sweep(config.sweep, config.scenario, uavsense::simulation_options(config.scenario),
                                    [](const uavsense::ScenarioConfig& point, std::size_t done, std::size_t total) {
                                      std::cerr << "[" << done << "/" << total << "] "
                                                << uavsense::to_string(point.beamformer) << " L=" << point.grid_side
                                                << " d=" << point.cell_size_m() << " n=" << point.array_side
                                                << " sigma_G=" << point.ground_rcs_dbsm << "\n";
                                    });
  emit(args, config, rows);
  return 0;
}

int selftest_command()
{
  bool all = true;
  for (const auto& r : uavsense::run_selftests())
  {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Distributed UAV sensing simulator"};
  app.set_version_flag("--version", std::string(UAVSENSE_VERSION));
  app.require_subcommand(1);

  CommonArgs run_args;
  auto* run = app.add_subcommand("run", "one Monte Carlo batch at the resolved configuration");
  add_common(run, run_args);

  CommonArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "parameter sweep from a preset or the config's sweep.* keys");
  add_common(sweep, sweep_args);
  sweep->add_option("--preset", sweep_args.preset, "named sweep")
      ->check(CLI::IsMember({"fig3", "fig4", "fig5", "fig6", "fig7"}));

  auto* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (*run)
      return run_command(run_args);
    if (*sweep)
      return sweep_command(sweep_args);
    if (*selftest)
      return selftest_command();
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
