#include "thermoloop/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace thermoloop {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ScenarioError(origin + ": " + what);
}

double require_number(const json& j, const char* key, const std::string& origin) {
  if (!j.contains(key) || !j[key].is_number())
    fail(origin, std::string("missing or non-numeric field '") + key + "'");
  return j[key].get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? j[key].get<double>() : fallback;
}

ThermalParams parse_thermal(const json& j, const std::string& origin) {
  ThermalParams p;
  p.resistance_k_per_w = number_or(j, "resistance_k_per_w", p.resistance_k_per_w);
  p.capacitance_j_per_k = number_or(j, "capacitance_j_per_k", p.capacitance_j_per_k);
  p.ambient_k = number_or(j, "ambient_k", p.ambient_k);
  p.leak_activation_k = number_or(j, "leak_activation_k", p.leak_activation_k);
  p.leak_prefactor_w = number_or(j, "leak_prefactor_w", p.leak_prefactor_w);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    fail(origin, std::string("thermal: ") + e.what());
  }
  return p;
}

Cluster parse_cluster(const json& j, const std::string& origin) {
  Cluster c;
  const auto id = cluster_from_string(j.value("id", ""));
  if (!id) fail(origin, "cluster id must be one of little/big/gpu");
  c.id = *id;
  c.perf_scale = number_or(j, "perf_scale", 1.0);

  const double cluster_cap = number_or(j, "cap_coeff_w_per_mhz_v2", 0.0);
  if (j.contains("opps")) {
    for (const json& row : j["opps"]) {
      Opp o;
      o.frequency_mhz = require_number(row, "freq_mhz", origin);
      o.voltage_v = number_or(row, "voltage_v", 1.0);
      o.cap_coeff_w_per_mhz_v2 = number_or(row, "cap_coeff_w_per_mhz_v2", cluster_cap);
      c.opp_table.push_back(o);
    }
  } else if (j.contains("opp_freqs_mhz")) {
    // Shorthand: voltages linear from 1.0 V at the bottom OPP to 1.25 V at
    // the top, one cap coefficient for the whole cluster.
    const auto freqs = j["opp_freqs_mhz"].get<std::vector<double>>();
    if (freqs.size() < 2) fail(origin, "opp_freqs_mhz needs at least two entries");
    const double f_lo = freqs.front(), f_hi = freqs.back();
    for (const double f : freqs) {
      Opp o;
      o.frequency_mhz = f;
      o.voltage_v = 1.0 + 0.25 * (f - f_lo) / (f_hi - f_lo);
      o.cap_coeff_w_per_mhz_v2 = cluster_cap;
      c.opp_table.push_back(o);
    }
  } else {
    fail(origin, "cluster '" + to_string(c.id) + "' needs 'opps' or 'opp_freqs_mhz'");
  }

  c.max_opp_cap = c.opp_table.size() - 1;
  c.current_opp = c.max_opp_cap;
  if (j.contains("initial_opp_mhz")) {
    const double f = j["initial_opp_mhz"].get<double>();
    const auto it = std::find_if(c.opp_table.begin(), c.opp_table.end(),
                                 [f](const Opp& o) { return o.frequency_mhz == f; });
    if (it == c.opp_table.end())
      fail(origin, "initial_opp_mhz " + std::to_string(f) + " is not an OPP of cluster '" +
                       to_string(c.id) + "'");
    c.current_opp = static_cast<std::size_t>(it - c.opp_table.begin());
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    fail(origin, "cluster '" + to_string(c.id) + "': " + e.what());
  }
  return c;
}

DemandSchedule parse_demand(const json& j, const std::string& origin) {
  DemandSchedule d;
  if (j.contains("constant")) {
    d.segments.push_back({1.0, j["constant"].get<double>()});
  } else if (j.contains("pattern")) {
    for (const json& seg : j["pattern"])
      d.segments.push_back({require_number(seg, "duration_s", origin),
                            require_number(seg, "level", origin)});
    d.repeat = j.value("repeat", false);
  } else {
    fail(origin, "demand needs 'constant' or 'pattern'");
  }
  for (const auto& seg : d.segments) {
    if (!(seg.duration_s > 0.0)) fail(origin, "demand segment duration must be > 0");
    if (seg.level < 0.0 || seg.level > 1.0) fail(origin, "demand level must be in [0, 1]");
  }
  return d;
}

Process parse_process(const json& j, const std::string& origin) {
  Process p;
  if (!j.contains("pid") || !j["pid"].is_number_integer())
    fail(origin, "process needs an integer pid");
  p.pid = j["pid"].get<int>();
  p.name = j.value("name", "pid" + std::to_string(p.pid));
  const auto cl = cluster_from_string(j.value("cluster", ""));
  if (!cl) fail(origin, "process " + p.name + ": cluster must be little/big/gpu");
  p.assigned_cluster = *cl;
  p.home_cluster = *cl;
  p.realtime_exempt = j.value("exempt", false);
  p.is_foreground_app = j.value("foreground", false);
  p.jitter = number_or(j, "jitter", 0.0);
  if (p.jitter < 0.0 || p.jitter >= 1.0) fail(origin, "jitter must be in [0, 1)");
  if (!j.contains("demand")) fail(origin, "process " + p.name + ": missing demand");
  p.demand = parse_demand(j["demand"], origin);
  return p;
}

GovernorConfig parse_governor_config(const json& j, double thermal_limit_k,
                                     const std::string& origin) {
  GovernorConfig cfg;
  cfg.thermal_limit_k = thermal_limit_k;
  cfg.period_s = number_or(j, "period_s", cfg.period_s);
  cfg.time_limit_s = number_or(j, "time_limit_s", cfg.time_limit_s);
  cfg.hysteresis_k = number_or(j, "hysteresis_k", cfg.hysteresis_k);
  cfg.epsilon_k = number_or(j, "epsilon_k", cfg.epsilon_k);
  cfg.restore_to_big = j.value("restore_to_big", false);
  if (j.contains("trip_points_k"))
    cfg.trip_points_k = j["trip_points_k"].get<std::vector<double>>();
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    fail(origin, std::string("governor: ") + e.what());
  }
  return cfg;
}

GovernorSetup parse_governor(const json& j, const std::string& origin) {
  GovernorSetup g;
  const auto kind = governor_from_string(j.value("name", "interactive"));
  if (!kind) fail(origin, "governor name must be none/interactive/trip/proposed");
  g.kind = *kind;
  g.dvfs_period_s = number_or(j, "dvfs_period_s", 0.1);
  if (!(g.dvfs_period_s > 0.0)) fail(origin, "dvfs_period_s must be > 0");

  const double limit = number_or(j, "thermal_limit_k", 345.0);
  g.trip = parse_governor_config(j.value("trip", json::object()), limit, origin);
  if (g.trip.trip_points_k.empty()) g.trip.trip_points_k = {limit};
  g.proposed = parse_governor_config(j.value("proposed", json::object()), limit, origin);

  if (j.contains("trip") && j["trip"].contains("initial_cap_mhz")) {
    for (const auto& [name, freq] : j["trip"]["initial_cap_mhz"].items()) {
      const auto id = cluster_from_string(name);
      if (!id) fail(origin, "initial_cap_mhz: unknown cluster '" + name + "'");
      g.trip_initial_cap_mhz[*id] = freq.get<double>();
    }
  }
  if (j.contains("realtime_exempt_pids"))
    g.realtime_exempt_pids = j["realtime_exempt_pids"].get<std::vector<int>>();
  return g;
}

Scenario parse(const json& root, const std::string& origin) {
  Scenario s;
  if (!root.contains("thermal")) fail(origin, "missing 'thermal' section");
  s.thermal = parse_thermal(root["thermal"], origin);
  s.initial_temperature_k =
      number_or(root["thermal"], "initial_temperature_k", s.thermal.ambient_k);
  s.runaway_ceiling_k = number_or(root["thermal"], "runaway_ceiling_k", kDefaultRunawayCeilingK);

  if (!root.contains("clusters")) fail(origin, "missing 'clusters' section");
  for (const json& jc : root["clusters"]) s.clusters.push_back(parse_cluster(jc, origin));

  if (root.contains("processes"))
    for (const json& jp : root["processes"]) s.processes.push_back(parse_process(jp, origin));

  if (root.contains("app")) {
    AppFrameModel app;
    app.work_per_frame_mhz_s = require_number(root["app"], "work_per_frame_mhz_s", origin);
    app.target_fps = require_number(root["app"], "target_fps", origin);
    app.render_pid = root["app"].value("render_pid", 0);
    s.app = app;
  }

  s.governor = parse_governor(root.value("governor", json::object()), origin);
  s.duration_s = number_or(root, "duration_s", s.duration_s);
  s.dt_s = number_or(root, "dt_s", s.dt_s);
  if (root.contains("seed")) s.seed = root["seed"].get<std::uint64_t>();

  try {
    s.validate();
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    fail(origin, e.what());
  }
  return s;
}

}  // namespace

void Scenario::validate() const {
  thermal.validate();
  if (!(initial_temperature_k > 0.0)) throw ScenarioError("initial temperature must be > 0");
  if (!(dt_s > 0.0)) throw ScenarioError("dt_s must be > 0");
  if (!(duration_s >= dt_s)) throw ScenarioError("duration_s must be >= dt_s");

  bool seen[3] = {false, false, false};
  for (const Cluster& c : clusters) {
    c.validate();
    bool& flag = seen[static_cast<int>(c.id)];
    if (flag) throw ScenarioError("duplicate cluster '" + to_string(c.id) + "'");
    flag = true;
  }
  if (!(seen[0] && seen[1] && seen[2]))
    throw ScenarioError("scenario needs little, big and gpu clusters");

  std::vector<int> pids;
  for (const Process& p : processes) {
    if (std::find(pids.begin(), pids.end(), p.pid) != pids.end())
      throw ScenarioError("duplicate pid " + std::to_string(p.pid));
    pids.push_back(p.pid);
  }
  if (app) {
    if (!(app->work_per_frame_mhz_s > 0.0)) throw ScenarioError("work_per_frame must be > 0");
    if (!(app->target_fps > 0.0)) throw ScenarioError("target_fps must be > 0");
    if (std::find(pids.begin(), pids.end(), app->render_pid) == pids.end())
      throw ScenarioError("app.render_pid does not name a process");
  }
  for (int pid : governor.realtime_exempt_pids)
    if (std::find(pids.begin(), pids.end(), pid) == pids.end())
      throw ScenarioError("realtime_exempt_pids: unknown pid " + std::to_string(pid));
}

Scenario parse_scenario(const std::string& json_text, const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(origin + ": " + e.what());
  }
  return parse(root, origin);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

ThermalParams load_thermal_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open params file: " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError(path + ": " + e.what());
  }
  // Accepts either a bare params object or a scenario-style file.
  const json& j = root.contains("thermal") ? root["thermal"] : root;
  return parse_thermal(j, path);
}

}  // namespace thermoloop
