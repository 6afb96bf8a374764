#include "thermoloop/governors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace thermoloop {

std::optional<GovernorKind> governor_from_string(std::string_view name) {
  if (name == "none") return GovernorKind::None;
  if (name == "interactive") return GovernorKind::Interactive;
  if (name == "trip") return GovernorKind::Trip;
  if (name == "proposed") return GovernorKind::Proposed;
  return std::nullopt;
}

std::string to_string(GovernorKind kind) {
  switch (kind) {
    case GovernorKind::None: return "none";
    case GovernorKind::Interactive: return "interactive";
    case GovernorKind::Trip: return "trip";
    case GovernorKind::Proposed: return "proposed";
  }
  return "?";
}

void GovernorConfig::validate() const {
  if (!(period_s > 0.0)) throw std::invalid_argument("governor period must be > 0");
  if (!(time_limit_s > 0.0)) throw std::invalid_argument("time_limit must be > 0");
  if (!(epsilon_k > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!std::is_sorted(trip_points_k.begin(), trip_points_k.end()))
    throw std::invalid_argument("trip points must be ascending");
}

std::string decision_tag(const GovernorDecision& decision) {
  if (std::holds_alternative<std::monostate>(decision)) return "none";
  if (const auto* t = std::get_if<ThrottleAll>(&decision))
    return "throttle:" + std::to_string(t->steps);
  if (const auto* r = std::get_if<Restore>(&decision))
    return "restore:" + std::to_string(r->steps);
  const auto& m = std::get<Migrate>(decision);
  return "migrate:" + std::to_string(m.pid) + ":" + to_string(m.target);
}

void interactive_dvfs(std::vector<Cluster>& clusters,
                      const std::vector<double>& cluster_utilization) {
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    Cluster& c = clusters[i];
    if (cluster_utilization[i] > 0.0) {
      c.current_opp = std::min(c.top_opp(), c.max_opp_cap);
    } else if (c.current_opp > 0) {
      --c.current_opp;
    }
  }
}

GovernorDecision trip_point_tick(double temperature_k, const std::vector<Cluster>& clusters,
                                 const GovernorConfig& config) {
  if (config.trip_points_k.empty()) return {};
  const double lowest = config.trip_points_k.front();
  if (temperature_k >= lowest) return ThrottleAll{1};
  if (temperature_k < lowest - config.hysteresis_k) {
    const bool capped = std::any_of(clusters.begin(), clusters.end(),
                                    [](const Cluster& c) { return c.max_opp_cap < c.top_opp(); });
    if (capped) return Restore{1};
  }
  return {};
}

namespace {

// First time the trajectory from T0 under constant power reaches the limit.
// Only "within time_limit" matters, so integration stops just past it.
std::optional<double> time_to_limit_crossing(const ThermalParams& params, double t0_k,
                                             double power_w, double limit_k,
                                             double time_limit_s) {
  if (t0_k >= limit_k) return 0.0;
  const double dt = 0.01;
  const auto steps = static_cast<std::size_t>(std::ceil(time_limit_s / dt)) + 1;
  double t_k = t0_k;
  for (std::size_t i = 0; i < steps; ++i) {
    t_k = rk4_step(params, power_w, t_k, dt);
    if (t_k >= limit_k) return static_cast<double>(i + 1) * dt;
  }
  return std::nullopt;
}

}  // namespace

GovernorDecision proposed_tick(const ProposedTickContext& ctx, const GovernorConfig& config) {
  const FixedPointAnalysis analysis =
      analyze_fixed_points(ctx.thermal, ctx.total_dynamic_power_w);

  if (analysis.stable_temperature_k &&
      *analysis.stable_temperature_k <= config.thermal_limit_k) {
    if (config.restore_to_big &&
        *analysis.stable_temperature_k <= config.thermal_limit_k - config.hysteresis_k) {
      const Process* displaced = nullptr;
      for (const Process& p : ctx.processes)
        if (p.assigned_cluster != p.home_cluster && (!displaced || p.pid < displaced->pid))
          displaced = &p;
      if (displaced) return Migrate{displaced->pid, displaced->home_cluster};
    }
    return {};
  }

  // The steady state violates the limit (or does not exist). How soon?
  double time_to_violation = 0.0;
  if (analysis.root_count == 0 ||
      (analysis.unstable_temperature_k &&
       ctx.temperature_k > *analysis.unstable_temperature_k)) {
    time_to_violation = 0.0;  // runaway counts as imminent
  } else {
    const auto crossing =
        time_to_limit_crossing(ctx.thermal, ctx.temperature_k, ctx.total_dynamic_power_w,
                               config.thermal_limit_k, config.time_limit_s);
    if (!crossing) return {};  // not within the user-defined limit
    time_to_violation = *crossing;
  }
  if (time_to_violation > config.time_limit_s) return {};

  // Most power-hungry non-exempt process currently on the big cluster,
  // judged over a one-second window to filter momentary peaks.
  const Process* candidate = nullptr;
  double candidate_power = -1.0;
  for (const Process& p : ctx.processes) {
    if (p.assigned_cluster != ClusterId::Big) continue;
    if (p.realtime_exempt || ctx.realtime_registry.count(p.pid)) continue;
    const double w = ctx.history.size() ? ctx.history.windowed_power_w(p.pid) : 0.0;
    if (w > candidate_power || (w == candidate_power && candidate && p.pid < candidate->pid)) {
      candidate = &p;
      candidate_power = w;
    }
  }
  if (candidate) return Migrate{candidate->pid, ClusterId::Little};
  return ThrottleAll{1};  // nothing migratable left; throttle for safety
}

void register_realtime(std::set<int>& registry, const std::vector<Process>& processes,
                       int pid) {
  const bool known = std::any_of(processes.begin(), processes.end(),
                                 [pid](const Process& p) { return p.pid == pid; });
  if (!known) throw std::invalid_argument("register_realtime: unknown pid");
  registry.insert(pid);
}

void apply_decision(const GovernorDecision& decision, std::vector<Cluster>& clusters,
                    std::vector<Process>& processes) {
  if (const auto* t = std::get_if<ThrottleAll>(&decision)) {
    for (Cluster& c : clusters) {
      const auto steps = static_cast<std::size_t>(t->steps);
      c.max_opp_cap = c.max_opp_cap > steps ? c.max_opp_cap - steps : 0;
      c.current_opp = std::min(c.current_opp, c.max_opp_cap);
    }
  } else if (const auto* r = std::get_if<Restore>(&decision)) {
    for (Cluster& c : clusters)
      c.max_opp_cap = std::min(c.top_opp(), c.max_opp_cap + static_cast<std::size_t>(r->steps));
  } else if (const auto* m = std::get_if<Migrate>(&decision)) {
    for (Process& p : processes)
      if (p.pid == m->pid) p.assigned_cluster = m->target;
  }
}

}  // namespace thermoloop
