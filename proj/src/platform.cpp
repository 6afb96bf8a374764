#include "thermoloop/platform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace thermoloop {

std::string to_string(ClusterId id) {
  switch (id) {
    case ClusterId::Little: return "little";
    case ClusterId::Big: return "big";
    case ClusterId::Gpu: return "gpu";
  }
  return "?";
}

std::optional<ClusterId> cluster_from_string(std::string_view name) {
  if (name == "little") return ClusterId::Little;
  if (name == "big") return ClusterId::Big;
  if (name == "gpu") return ClusterId::Gpu;
  return std::nullopt;
}

void Cluster::validate() const {
  if (opp_table.empty()) throw std::invalid_argument("cluster needs at least one OPP");
  for (std::size_t i = 0; i < opp_table.size(); ++i) {
    const Opp& o = opp_table[i];
    if (!(o.frequency_mhz > 0.0)) throw std::invalid_argument("OPP frequency must be > 0");
    if (!(o.voltage_v > 0.0)) throw std::invalid_argument("OPP voltage must be > 0");
    if (!(o.cap_coeff_w_per_mhz_v2 >= 0.0))
      throw std::invalid_argument("OPP cap coefficient must be >= 0");
    if (i > 0) {
      if (!(o.frequency_mhz > opp_table[i - 1].frequency_mhz))
        throw std::invalid_argument("OPP frequencies must be strictly ascending");
      if (o.voltage_v < opp_table[i - 1].voltage_v)
        throw std::invalid_argument("OPP voltages must be non-decreasing");
    }
  }
  if (current_opp >= opp_table.size()) throw std::invalid_argument("current_opp out of range");
  if (max_opp_cap >= opp_table.size()) throw std::invalid_argument("max_opp_cap out of range");
  if (!(perf_scale > 0.0)) throw std::invalid_argument("perf_scale must be > 0");
}

double DemandSchedule::total_duration_s() const {
  double sum = 0.0;
  for (const Segment& s : segments) sum += s.duration_s;
  return sum;
}

double DemandSchedule::level_at(double t_s) const {
  if (segments.empty()) return 0.0;
  const double total = total_duration_s();
  double t = t_s;
  if (repeat && total > 0.0) t = std::fmod(t, total);
  double edge = 0.0;
  for (const Segment& s : segments) {
    edge += s.duration_s;
    if (t < edge) return s.level;
  }
  return segments.back().level;  // one-shot schedules hold their last level
}

double PowerBreakdown::dynamic_total_w() const {
  double sum = 0.0;
  for (const auto& [id, w] : dynamic_w) sum += w;
  return sum;
}

double effective_utilization(double demand_level, const Cluster& cluster,
                             double big_max_frequency_mhz) {
  if (demand_level <= 0.0) return 0.0;
  const double delivered = cluster.frequency_mhz() * cluster.perf_scale;
  return std::min(1.0, demand_level * big_max_frequency_mhz / delivered);
}

double dynamic_power(const Cluster& cluster, double total_utilization) {
  const Opp& o = cluster.opp();
  return o.cap_coeff_w_per_mhz_v2 * o.frequency_mhz * o.voltage_v * o.voltage_v *
         total_utilization;
}

double achieved_fps(const AppFrameModel& app, const Cluster& gpu_cluster,
                    double app_utilization_share) {
  if (app_utilization_share <= 0.0) return 0.0;
  const double throughput = gpu_cluster.frequency_mhz() * app_utilization_share;
  return std::min(app.target_fps, throughput / app.work_per_frame_mhz_s);
}

void PowerHistory::push(const std::map<int, double>& attributed_w) {
  if (max_keep_ == 0)
    max_keep_ = static_cast<std::size_t>(std::ceil(kMaxWindowS / dt_s_)) + 1;
  steps_.push_back(attributed_w);
  while (steps_.size() > max_keep_) steps_.pop_front();
}

double PowerHistory::windowed_power_w(int pid, double window_s) const {
  if (!(window_s > 0.0)) throw std::invalid_argument("window must be > 0");
  if (steps_.empty()) return 0.0;

  auto wanted = static_cast<std::size_t>(std::llround(window_s / dt_s_));
  wanted = std::max<std::size_t>(wanted, 1);
  const std::size_t n = std::min(wanted, steps_.size());

  bool seen = false;
  double sum = 0.0;
  for (std::size_t i = steps_.size() - n; i < steps_.size(); ++i) {
    auto it = steps_[i].find(pid);
    if (it != steps_[i].end()) {
      seen = true;
      sum += it->second;
    }
  }
  if (!seen) throw std::invalid_argument("unknown pid in power history");
  return sum / static_cast<double>(n);
}

}  // namespace thermoloop
