#pragma once

#include "uavsense/config.hpp"
#include "uavsense/sweep.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace uavsense
{

/// Everything a config file can set: the scenario plus an optional sweep.
struct RunConfig
{
  ScenarioConfig scenario;
  SweepSpec sweep;
};

/// 17 significant digits, locale-independent.
inline std::string format_double(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// Shortest text that reads back to the same double.
inline std::string format_shortest(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail
{
inline std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_list(std::string_view s)
{
  std::vector<std::string_view> items;
  if (trim(s).empty())
    return items;
  std::size_t start = 0;
  for (;;)
  {
    const auto comma = s.find(',', start);
    items.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return items;
}

inline double parse_double(const std::string& key, std::string_view s)
{
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw config_error(key, "expected a number, got '" + std::string(s) + "'");
  return v;
}

template <typename Int>
Int parse_integer(const std::string& key, std::string_view s)
{
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw config_error(key, "expected an integer, got '" + std::string(s) + "'");
  return v;
}

inline bool parse_bool(const std::string& key, std::string_view s)
{
  if (s == "true" || s == "on" || s == "1")
    return true;
  if (s == "false" || s == "off" || s == "0")
    return false;
  throw config_error(key, "expected on/off, got '" + std::string(s) + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(std::string_view s, Parse&& parse)
{
  std::vector<T> out;
  for (auto item : split_list(s))
    out.push_back(parse(item));
  return out;
}

template <typename T, typename Format>
std::string join(const std::vector<T>& items, Format&& format)
{
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i)
  {
    if (i)
      out += ',';
    out += format(items[i]);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, std::string_view value)>;

inline const std::map<std::string, Setter, std::less<>>& setters()
{
  auto num = [](double ScenarioConfig::*field) -> Setter {
    return [field](RunConfig& c, const std::string& k, std::string_view v) { c.scenario.*field = parse_double(k, v); };
  };
  auto integer = [](int ScenarioConfig::*field) -> Setter {
    return [field](RunConfig& c, const std::string& k, std::string_view v) { c.scenario.*field = parse_integer<int>(k, v); };
  };
  static const std::map<std::string, Setter, std::less<>> table{
      {"scenario.transmit_power_w", num(&ScenarioConfig::transmit_power_w)},
      {"scenario.transmit_gain", num(&ScenarioConfig::transmit_gain)},
      {"scenario.area_side_m", num(&ScenarioConfig::area_side_m)},
      {"scenario.uav_count", integer(&ScenarioConfig::uav_count)},
      {"scenario.noise_density_dbm_per_hz", num(&ScenarioConfig::noise_density_dbm_per_hz)},
      {"scenario.ground_rcs_dbsm", num(&ScenarioConfig::ground_rcs_dbsm)},
      {"scenario.target_rcs_dbsm", num(&ScenarioConfig::target_rcs_dbsm)},
      {"scenario.grid_side", integer(&ScenarioConfig::grid_side)},
      {"scenario.altitude_m",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         if (v == "auto")
           c.scenario.altitude_m.reset();
         else
           c.scenario.altitude_m = parse_double(k, v);
       }},
      {"scenario.layout", [](RunConfig& c, const std::string&, std::string_view v) { c.scenario.layout = parse_layout(v); }},
      {"ofdm.symbols", integer(&ScenarioConfig::symbols)},
      {"ofdm.subcarriers", integer(&ScenarioConfig::subcarriers)},
      {"ofdm.carrier_frequency_hz", num(&ScenarioConfig::carrier_frequency_hz)},
      {"ofdm.bandwidth_hz", num(&ScenarioConfig::bandwidth_hz)},
      {"ofdm.cp_duration_s", num(&ScenarioConfig::cp_duration_s)},
      {"ofdm.doppler_hz", num(&ScenarioConfig::doppler_hz)},
      {"array.side", integer(&ScenarioConfig::array_side)},
      {"beamformer.kind",
       [](RunConfig& c, const std::string&, std::string_view v) { c.scenario.beamformer = parse_beamformer_kind(v); }},
      {"beamformer.capon_loading", num(&ScenarioConfig::capon_loading)},
      {"beamformer.ls_iterations", integer(&ScenarioConfig::ls_iterations)},
      {"fusion.kind", [](RunConfig& c, const std::string&, std::string_view v) { c.scenario.fusion = parse_fusion_kind(v); }},
      {"sim.trials", integer(&ScenarioConfig::trials)},
      {"sim.seed",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         c.scenario.master_seed = parse_integer<std::uint64_t>(k, v);
       }},
      {"sim.deltas",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         c.scenario.deltas = parse_list<int>(v, [&](std::string_view s) { return parse_integer<int>(k, s); });
       }},
      {"sim.fast_path",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.scenario.fast_path = parse_bool(k, v); }},
      {"sim.threads", integer(&ScenarioConfig::threads)},
      {"sweep.param", [](RunConfig& c, const std::string&, std::string_view v) { c.sweep.param = parse_sweep_param(v); }},
      {"sweep.values",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         c.sweep.values = parse_list<double>(v, [&](std::string_view s) { return parse_double(k, s); });
       }},
      {"sweep.ground_rcs_dbsm",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         c.sweep.ground_rcs_dbsm = parse_list<double>(v, [&](std::string_view s) { return parse_double(k, s); });
       }},
      {"sweep.beamformers",
       [](RunConfig& c, const std::string&, std::string_view v) {
         c.sweep.beamformers = parse_list<beamformer_kind>(v, parse_beamformer_kind);
       }},
      {"sweep.fusions",
       [](RunConfig& c, const std::string&, std::string_view v) {
         c.sweep.fusions = parse_list<fusion_kind>(v, parse_fusion_kind);
       }},
      {"sweep.deltas",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         c.sweep.deltas = parse_list<int>(v, [&](std::string_view s) { return parse_integer<int>(k, s); });
       }},
  };
  return table;
}
} // namespace detail

/// Sets one dotted key. Unknown keys are rejected.
inline void apply_setting(RunConfig& config, std::string_view key, std::string_view value)
{
  const auto& table = detail::setters();
  const auto it = table.find(key);
  if (it == table.end())
    throw config_error(std::string(key), "unknown configuration key");
  it->second(config, it->first, detail::trim(value));
}

/// Parses "key=value" (as given to --set).
inline void apply_override(RunConfig& config, std::string_view assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw config_error(std::string(detail::trim(assignment)), "expected key=value");
  apply_setting(config, detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

/// Flat "section.key = value" text; '#' starts a comment. Starts from `base`
/// and validates the scenario afterwards.
inline RunConfig parse_config_text(std::string_view text, RunConfig base = {})
{
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size())
  {
    const auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw config_error("line " + std::to_string(line_no), "expected 'key = value'");
    apply_setting(base, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  base.scenario.validate();
  return base;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {})
{
  std::ifstream in(path);
  if (!in)
    throw config_error("--config", "cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), std::move(base));
}

/// Every key with its resolved value, in a form parse_config_text reads back exactly.
inline std::vector<std::pair<std::string, std::string>> to_key_values(const RunConfig& config)
{
  using detail::join;
  const ScenarioConfig& s = config.scenario;
  const SweepSpec& w = config.sweep;
  auto num = [](double v) { return format_shortest(v); };
  auto integer = [](long long v) { return std::to_string(v); };
  auto name = [](auto kind) { return std::string(to_string(kind)); };
  return {
      {"scenario.transmit_power_w", num(s.transmit_power_w)},
      {"scenario.transmit_gain", num(s.transmit_gain)},
      {"scenario.area_side_m", num(s.area_side_m)},
      {"scenario.uav_count", integer(s.uav_count)},
      {"scenario.noise_density_dbm_per_hz", num(s.noise_density_dbm_per_hz)},
      {"scenario.ground_rcs_dbsm", num(s.ground_rcs_dbsm)},
      {"scenario.target_rcs_dbsm", num(s.target_rcs_dbsm)},
      {"scenario.grid_side", integer(s.grid_side)},
      {"scenario.altitude_m", s.altitude_m ? num(*s.altitude_m) : "auto"},
      {"scenario.layout", name(s.layout)},
      {"ofdm.symbols", integer(s.symbols)},
      {"ofdm.subcarriers", integer(s.subcarriers)},
      {"ofdm.carrier_frequency_hz", num(s.carrier_frequency_hz)},
      {"ofdm.bandwidth_hz", num(s.bandwidth_hz)},
      {"ofdm.cp_duration_s", num(s.cp_duration_s)},
      {"ofdm.doppler_hz", num(s.doppler_hz)},
      {"array.side", integer(s.array_side)},
      {"beamformer.kind", name(s.beamformer)},
      {"beamformer.capon_loading", num(s.capon_loading)},
      {"beamformer.ls_iterations", integer(s.ls_iterations)},
      {"fusion.kind", name(s.fusion)},
      {"sim.trials", integer(s.trials)},
      {"sim.seed", std::to_string(s.master_seed)},
      {"sim.deltas", join(s.deltas, integer)},
      {"sim.fast_path", s.fast_path ? "on" : "off"},
      {"sim.threads", integer(s.threads)},
      {"sweep.param", name(w.param)},
      {"sweep.values", join(w.values, num)},
      {"sweep.ground_rcs_dbsm", join(w.ground_rcs_dbsm, num)},
      {"sweep.beamformers", join(w.beamformers, name)},
      {"sweep.fusions", join(w.fusions, name)},
      {"sweep.deltas", join(w.deltas, integer)},
  };
}

inline std::string config_echo(const RunConfig& config)
{
  std::string out;
  for (const auto& [key, value] : to_key_values(config))
    out += key + " = " + value + "\n";
  return out;
}

} // namespace uavsense
