#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermoloop/governors.hpp"
#include "thermoloop/platform.hpp"

namespace thermoloop {

/// Raised for malformed or inconsistent scenario / parameter files; the
/// message names the offending field.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GovernorSetup {
  GovernorKind kind = GovernorKind::Interactive;
  double dvfs_period_s = 0.1;
  GovernorConfig trip;
  GovernorConfig proposed;
  // Thermal caps the trip governor starts from, by cluster. Lets a scenario
  // begin mid-session with throttling already engaged.
  std::map<ClusterId, double> trip_initial_cap_mhz;
  std::vector<int> realtime_exempt_pids;
};

struct Scenario {
  ThermalParams thermal;
  double initial_temperature_k = 300.0;
  double runaway_ceiling_k = kDefaultRunawayCeilingK;
  std::vector<Cluster> clusters;   // little, big, gpu
  std::vector<Process> processes;
  std::optional<AppFrameModel> app;
  GovernorSetup governor;
  double duration_s = 60.0;
  double dt_s = 0.01;
  std::uint64_t seed = 0;

  void validate() const;  // throws ScenarioError
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text, const std::string& origin = "<inline>");

/// Standalone thermal-parameter files (used by the stability CLI verbs).
ThermalParams load_thermal_params(const std::string& path);

}  // namespace thermoloop
