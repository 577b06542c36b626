#pragma once

#include "uavsense/config_io.hpp"
#include "uavsense/sweep.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavsense
{

inline constexpr const char* csv_header =
    "sweep_param,sweep_value,beamformer,fusion,sigma_G_dBsm,delta,trials,hits,p_detect,ci95_halfwidth,seed";

class results_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

namespace detail
{
inline std::string csv_field(const std::string& s)
{
  if (s.find_first_of(",\"\r\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s)
  {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

/// Splits one CSV record; quoted fields may contain commas and doubled quotes.
inline std::vector<std::string> csv_split(const std::string& line)
{
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i)
  {
    const char c = line[i];
    if (quoted)
    {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"')
      {
        fields.back() += '"';
        ++i;
      }
      else if (c == '"')
        quoted = false;
      else
        fields.back() += c;
    }
    else if (c == '"')
      quoted = true;
    else if (c == ',')
      fields.emplace_back();
    else if (c != '\r')
      fields.back() += c;
  }
  return fields;
}
} // namespace detail

inline void write_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
  out << csv_header << "\r\n";
  for (const auto& r : rows)
    out << detail::csv_field(r.sweep_param) << ',' << format_double(r.sweep_value) << ',' << to_string(r.beamformer)
        << ',' << to_string(r.fusion) << ',' << format_double(r.ground_rcs_dbsm) << ',' << r.delta << ',' << r.trials
        << ',' << r.hits << ',' << format_double(r.p_detect) << ',' << format_double(r.ci95_halfwidth) << ','
        << r.seed << "\r\n";
}

inline std::vector<SweepRow> read_csv(std::istream& in)
{
  std::string line;
  if (!std::getline(in, line) || detail::csv_split(line) != detail::csv_split(csv_header))
    throw results_error("read_csv: missing or unexpected header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line))
  {
    if (line.empty() || line == "\r")
      continue;
    const auto f = detail::csv_split(line);
    if (f.size() != 11)
      throw results_error("read_csv: expected 11 fields, got " + std::to_string(f.size()));
    try
    {
      SweepRow r;
      r.sweep_param = f[0];
      r.sweep_value = detail::parse_double("sweep_value", f[1]);
      r.beamformer = parse_beamformer_kind(f[2]);
      r.fusion = parse_fusion_kind(f[3]);
      r.ground_rcs_dbsm = detail::parse_double("sigma_G_dBsm", f[4]);
      r.delta = detail::parse_integer<int>("delta", f[5]);
      r.trials = detail::parse_integer<long>("trials", f[6]);
      r.hits = detail::parse_integer<long>("hits", f[7]);
      r.p_detect = detail::parse_double("p_detect", f[8]);
      r.ci95_halfwidth = detail::parse_double("ci95_halfwidth", f[9]);
      r.seed = detail::parse_integer<std::uint64_t>("seed", f[10]);
      rows.push_back(r);
    }
    catch (const config_error& e)
    {
      throw results_error(std::string("read_csv: ") + e.what());
    }
  }
  return rows;
}

inline std::string utc_timestamp()
{
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Run manifest: config echo, version, seed, timestamp and every result row.
/// Numbers are carried as 17-digit strings where exactness matters.
inline nlohmann::ordered_json manifest_json(const RunConfig& config, const std::vector<SweepRow>& rows,
                                            const std::string& timestamp = utc_timestamp())
{
  nlohmann::ordered_json j;
  j["tool"] = "uavsense";
  j["version"] = UAVSENSE_VERSION;
  j["master_seed"] = config.scenario.master_seed;
  j["timestamp"] = timestamp;
  j["sweep"] = config.sweep.name.empty() ? std::string(to_string(config.sweep.param)) : config.sweep.name;
  auto& echo = j["config"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : to_key_values(config))
    echo[key] = value;
  auto& out = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows)
    out.push_back({{"sweep_param", r.sweep_param},
                   {"sweep_value", r.sweep_value},
                   {"beamformer", to_string(r.beamformer)},
                   {"fusion", to_string(r.fusion)},
                   {"sigma_G_dBsm", r.ground_rcs_dbsm},
                   {"delta", r.delta},
                   {"trials", r.trials},
                   {"hits", r.hits},
                   {"p_detect", r.p_detect},
                   {"ci95_halfwidth", r.ci95_halfwidth},
                   {"seed", r.seed}});
  return j;
}

/// Rebuilds the configuration stored in a manifest.
inline RunConfig config_from_manifest(const nlohmann::ordered_json& manifest)
{
  std::string text;
  for (const auto& [key, value] : manifest.at("config").items())
    text += key + " = " + value.get<std::string>() + "\n";
  return parse_config_text(text);
}

inline std::ofstream open_output(const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw results_error("cannot open '" + path + "' for writing");
  return out;
}

inline void write_results(const std::string& path, const std::string& format, const RunConfig& config,
                          const std::vector<SweepRow>& rows)
{
  if (rows.empty())
    throw results_error("write_results: no rows to write");
  if (format != "csv" && format != "json")
    throw results_error("unknown format '" + format + "' (expected csv or json)");
  auto out = open_output(path);
  if (format == "csv")
    write_csv(out, rows);
  else
    out << manifest_json(config, rows).dump(2) << "\n";
  out.flush();
  if (!out)
    throw results_error("failed writing '" + path + "'");
}

} // namespace uavsense
