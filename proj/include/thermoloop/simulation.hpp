#pragma once

#include <random>
#include <set>

#include "thermoloop/scenario.hpp"
#include "thermoloop/trace.hpp"

namespace thermoloop {

struct SimulationResult {
  Trace trace;
  bool runaway = false;
};

/// Steps a scenario forward: DVFS and thermal-governor ticks on their
/// configured periods, per-step power accounting and one RK4 temperature
/// step per dt. Deterministic for a given scenario + seed.
class Simulation {
 public:
  explicit Simulation(Scenario scenario);

  /// Advances one dt. Returns false once the run is finished (duration
  /// reached or runaway).
  bool step();

  void run();

  const Trace& trace() const { return trace_; }
  bool runaway() const { return runaway_; }
  double temperature_k() const { return temperature_k_; }
  double time_s() const { return static_cast<double>(step_index_) * scenario_.dt_s; }
  const std::vector<Cluster>& clusters() const { return clusters_; }
  const std::vector<Process>& processes() const { return processes_; }
  const PowerHistory& history() const { return history_; }
  const std::set<int>& realtime_registry() const { return realtime_registry_; }

  void register_realtime_pid(int pid);
  /// Reassigns a process; takes effect on the next step. Throws on an
  /// unknown pid; a no-op when already there.
  void migrate(int pid, ClusterId target);

  PowerBreakdown current_power() const { return last_power_; }

 private:
  void dvfs_tick();
  GovernorDecision governor_tick();

  Scenario scenario_;
  std::vector<Cluster> clusters_;
  std::vector<Process> processes_;
  std::set<int> realtime_registry_;
  PowerHistory history_;
  Trace trace_;
  std::mt19937_64 rng_;
  double temperature_k_;
  PowerBreakdown last_power_;
  std::size_t step_index_ = 0;
  std::size_t total_steps_ = 0;
  std::size_t dvfs_interval_ = 1;
  std::size_t governor_interval_ = 1;
  bool runaway_ = false;
  bool done_ = false;
};

SimulationResult run_simulation(const Scenario& scenario);

}  // namespace thermoloop
