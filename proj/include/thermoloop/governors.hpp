#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "thermoloop/platform.hpp"
#include "thermoloop/stability.hpp"

namespace thermoloop {

enum class GovernorKind { None, Interactive, Trip, Proposed };

std::optional<GovernorKind> governor_from_string(std::string_view name);
std::string to_string(GovernorKind kind);

struct GovernorConfig {
  double period_s = 0.1;
  double thermal_limit_k = 345.0;
  double time_limit_s = 10.0;          // violation-imminence threshold
  std::vector<double> trip_points_k;   // ascending
  double hysteresis_k = 2.0;
  double epsilon_k = 0.5;              // fixed-point proximity for time estimates
  // Off by default: when set, a process migrated away from its home cluster
  // is moved back once the steady state sits hysteresis_k below the limit.
  bool restore_to_big = false;

  void validate() const;
};

struct ThrottleAll {
  int steps = 1;
};
struct Migrate {
  int pid = 0;
  ClusterId target = ClusterId::Little;
};
struct Restore {
  int steps = 1;
};
using GovernorDecision = std::variant<std::monostate, ThrottleAll, Migrate, Restore>;

std::string decision_tag(const GovernorDecision& decision);

/// Interactive DVFS baseline: a cluster with any utilization runs at its top
/// OPP (under the thermal cap); an idle cluster steps down one OPP per tick.
void interactive_dvfs(std::vector<Cluster>& clusters,
                      const std::vector<double>& cluster_utilization);

/// Trip-point throttle-all baseline: past the lowest trip point every cluster
/// steps its thermal cap down one OPP per tick; once the temperature recovers
/// below trip - hysteresis the caps step back up.
GovernorDecision trip_point_tick(double temperature_k, const std::vector<Cluster>& clusters,
                                 const GovernorConfig& config);

/// Inputs the application-aware governor reads each tick.
struct ProposedTickContext {
  const ThermalParams& thermal;
  double temperature_k;
  double total_dynamic_power_w;
  const std::vector<Process>& processes;
  const PowerHistory& history;
  const std::set<int>& realtime_registry;
};

/// Application-aware governor tick:
///   1. locate the fixed points at the current dynamic power;
///   2. a stable fixed point at or below the limit needs no action;
///   3. otherwise estimate how soon the trajectory crosses the limit
///      (no fixed point counts as "now");
///   4. a violation further out than time_limit needs no action;
///   5. otherwise migrate the non-exempt big-cluster process with the highest
///      1 s windowed power to the little cluster (ties: lowest pid);
///   6. with no candidate, fall back to a one-step throttle.
GovernorDecision proposed_tick(const ProposedTickContext& ctx, const GovernorConfig& config);

/// Marks a pid as real-time: it is never chosen for migration. Idempotent;
/// throws on an unknown pid.
void register_realtime(std::set<int>& registry, const std::vector<Process>& processes,
                       int pid);

/// Applies a decision to cluster caps / process mapping. Migrations take
/// effect on the next simulation step.
void apply_decision(const GovernorDecision& decision, std::vector<Cluster>& clusters,
                    std::vector<Process>& processes);

}  // namespace thermoloop
