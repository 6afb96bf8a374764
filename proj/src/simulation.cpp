#include "thermoloop/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace thermoloop {

namespace {

std::size_t index_of(const std::vector<Cluster>& clusters, ClusterId id) {
  for (std::size_t i = 0; i < clusters.size(); ++i)
    if (clusters[i].id == id) return i;
  throw std::logic_error("cluster missing");
}

std::size_t interval_steps(double period_s, double dt_s) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(period_s / dt_s)));
}

}  // namespace

Simulation::Simulation(Scenario scenario)
    : scenario_(std::move(scenario)),
      history_(scenario_.dt_s),
      rng_(scenario_.seed),
      temperature_k_(scenario_.initial_temperature_k) {
  scenario_.validate();
  clusters_ = scenario_.clusters;
  processes_ = scenario_.processes;

  for (int pid : scenario_.governor.realtime_exempt_pids)
    register_realtime(realtime_registry_, processes_, pid);
  for (const Process& p : processes_)
    if (p.realtime_exempt) realtime_registry_.insert(p.pid);

  if (scenario_.governor.kind == GovernorKind::Trip) {
    for (const auto& [id, freq] : scenario_.governor.trip_initial_cap_mhz) {
      Cluster& c = clusters_[index_of(clusters_, id)];
      const auto it =
          std::find_if(c.opp_table.begin(), c.opp_table.end(),
                       [f = freq](const Opp& o) { return o.frequency_mhz == f; });
      if (it == c.opp_table.end())
        throw ScenarioError("trip initial cap is not an OPP of cluster " + to_string(id));
      c.max_opp_cap = static_cast<std::size_t>(it - c.opp_table.begin());
      c.current_opp = std::min(c.current_opp, c.max_opp_cap);
    }
  }

  total_steps_ = static_cast<std::size_t>(std::llround(scenario_.duration_s / scenario_.dt_s));
  dvfs_interval_ = interval_steps(scenario_.governor.dvfs_period_s, scenario_.dt_s);
  const GovernorConfig& active = scenario_.governor.kind == GovernorKind::Proposed
                                     ? scenario_.governor.proposed
                                     : scenario_.governor.trip;
  governor_interval_ = interval_steps(active.period_s, scenario_.dt_s);
  trace_.samples.reserve(total_steps_);
}

void Simulation::register_realtime_pid(int pid) {
  register_realtime(realtime_registry_, processes_, pid);
}

void Simulation::migrate(int pid, ClusterId target) {
  const auto it = std::find_if(processes_.begin(), processes_.end(),
                               [pid](const Process& p) { return p.pid == pid; });
  if (it == processes_.end()) throw std::invalid_argument("migrate: unknown pid");
  it->assigned_cluster = target;
}

bool Simulation::step() {
  if (done_) return false;

  const double dt = scenario_.dt_s;
  const double t = static_cast<double>(step_index_) * dt;
  const GovernorKind kind = scenario_.governor.kind;

  // Demands for this step, jittered per process in declaration order so a
  // fixed seed reproduces the run exactly.
  std::vector<double> demand(processes_.size());
  for (std::size_t i = 0; i < processes_.size(); ++i) {
    double level = processes_[i].demand.level_at(t);
    if (processes_[i].jitter > 0.0) {
      std::uniform_real_distribution<double> dist(-processes_[i].jitter,
                                                  processes_[i].jitter);
      level = std::clamp(level * (1.0 + dist(rng_)), 0.0, 1.0);
    }
    demand[i] = level;
  }

  // Frequency governor: pin busy clusters to their (cap-limited) top OPP,
  // walk idle ones down.
  if (kind != GovernorKind::None && step_index_ % dvfs_interval_ == 0) {
    std::vector<double> busy(clusters_.size(), 0.0);
    for (std::size_t i = 0; i < processes_.size(); ++i)
      busy[index_of(clusters_, processes_[i].assigned_cluster)] += demand[i];
    interactive_dvfs(clusters_, busy);
  }

  const double big_max =
      clusters_[index_of(clusters_, ClusterId::Big)].max_frequency_mhz();

  std::vector<double> utilization(processes_.size(), 0.0);
  std::vector<double> cluster_util(clusters_.size(), 0.0);
  for (std::size_t i = 0; i < processes_.size(); ++i) {
    const std::size_t ci = index_of(clusters_, processes_[i].assigned_cluster);
    utilization[i] = effective_utilization(demand[i], clusters_[ci], big_max);
    cluster_util[ci] += utilization[i];
  }

  PowerBreakdown power;
  for (std::size_t ci = 0; ci < clusters_.size(); ++ci)
    power.dynamic_w[clusters_[ci].id] = dynamic_power(clusters_[ci], cluster_util[ci]);
  power.leakage_w = leakage_power(scenario_.thermal, temperature_k_);
  power.total_w = power.dynamic_total_w() + power.leakage_w;
  last_power_ = power;

  std::map<int, double> attributed;
  for (std::size_t i = 0; i < processes_.size(); ++i) {
    const std::size_t ci = index_of(clusters_, processes_[i].assigned_cluster);
    const double share =
        cluster_util[ci] > 0.0 ? utilization[i] / cluster_util[ci] : 0.0;
    attributed[processes_[i].pid] = share * power.dynamic_w.at(clusters_[ci].id);
  }
  history_.push(attributed);

  double fps = 0.0;
  if (scenario_.app) {
    const std::size_t gi = index_of(clusters_, ClusterId::Gpu);
    double render_util = 0.0;
    for (std::size_t i = 0; i < processes_.size(); ++i)
      if (processes_[i].pid == scenario_.app->render_pid &&
          processes_[i].assigned_cluster == ClusterId::Gpu)
        render_util = utilization[i];
    const double share = cluster_util[gi] > 0.0 ? render_util / cluster_util[gi] : 0.0;
    fps = achieved_fps(*scenario_.app, clusters_[gi], share);
  }

  GovernorDecision decision{};
  if ((kind == GovernorKind::Trip || kind == GovernorKind::Proposed) &&
      step_index_ % governor_interval_ == 0) {
    if (kind == GovernorKind::Trip) {
      decision = trip_point_tick(temperature_k_, clusters_, scenario_.governor.trip);
    } else {
      const ProposedTickContext ctx{scenario_.thermal,     temperature_k_,
                                    power.dynamic_total_w(), processes_,
                                    history_,              realtime_registry_};
      decision = proposed_tick(ctx, scenario_.governor.proposed);
    }
  }

  TraceSample sample;
  sample.t_s = t;
  sample.temperature_c = kelvin_to_celsius(temperature_k_);
  sample.f_little_mhz = clusters_[index_of(clusters_, ClusterId::Little)].frequency_mhz();
  sample.f_big_mhz = clusters_[index_of(clusters_, ClusterId::Big)].frequency_mhz();
  sample.f_gpu_mhz = clusters_[index_of(clusters_, ClusterId::Gpu)].frequency_mhz();
  sample.p_little_w = power.dynamic_w.at(ClusterId::Little);
  sample.p_big_w = power.dynamic_w.at(ClusterId::Big);
  sample.p_gpu_w = power.dynamic_w.at(ClusterId::Gpu);
  sample.p_leak_w = power.leakage_w;
  sample.p_total_w = power.total_w;
  sample.fps = fps;
  sample.decision = decision_tag(decision);
  for (const Process& p : processes_) sample.mapping[p.pid] = p.assigned_cluster;
  trace_.samples.push_back(std::move(sample));

  // Decisions land after the sample so their first effect is the next step.
  apply_decision(decision, clusters_, processes_);

  temperature_k_ = rk4_step(scenario_.thermal, power.dynamic_total_w(), temperature_k_, dt);
  ++step_index_;

  if (temperature_k_ > scenario_.runaway_ceiling_k) {
    runaway_ = true;
    done_ = true;
  } else if (step_index_ >= total_steps_) {
    done_ = true;
  }
  return !done_;
}

void Simulation::run() {
  while (step()) {
  }
}

SimulationResult run_simulation(const Scenario& scenario) {
  Simulation sim(scenario);
  sim.run();
  return {sim.trace(), sim.runaway()};
}

}  // namespace thermoloop
