#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thermoloop/thermal.hpp"

namespace thermoloop {

enum class ClusterId { Little, Big, Gpu };

std::string to_string(ClusterId id);
std::optional<ClusterId> cluster_from_string(std::string_view name);

struct Opp {
  double frequency_mhz = 0.0;
  double voltage_v = 1.0;
  double cap_coeff_w_per_mhz_v2 = 0.0;
};

struct Cluster {
  ClusterId id = ClusterId::Big;
  std::vector<Opp> opp_table;  // ascending frequency
  std::size_t current_opp = 0;
  std::size_t max_opp_cap = 0;  // thermal frequency cap; DVFS never exceeds it
  double perf_scale = 1.0;      // delivered throughput per MHz relative to Big

  void validate() const;  // throws std::invalid_argument
  const Opp& opp() const { return opp_table[current_opp]; }
  std::size_t top_opp() const { return opp_table.size() - 1; }
  double max_frequency_mhz() const { return opp_table.back().frequency_mhz; }
  double frequency_mhz() const { return opp().frequency_mhz; }
};

/// Piecewise-constant demand schedule. Levels are required utilization at the
/// big cluster's top frequency, in [0, 1]. A repeating schedule wraps time
/// modulo its total length; a one-shot schedule holds its last level.
struct DemandSchedule {
  struct Segment {
    double duration_s = 0.0;
    double level = 0.0;
  };
  std::vector<Segment> segments;
  bool repeat = false;

  double level_at(double t_s) const;
  double total_duration_s() const;
};

struct Process {
  int pid = 0;
  std::string name;
  DemandSchedule demand;
  double jitter = 0.0;  // relative demand jitter drawn per step, +-jitter
  ClusterId assigned_cluster = ClusterId::Big;
  ClusterId home_cluster = ClusterId::Big;  // where the scenario placed it
  bool realtime_exempt = false;
  bool is_foreground_app = false;
};

/// Frame model of the foreground app: the render process consumes GPU cycles
/// and produces work_per_frame worth of throughput per frame, capped at the
/// vsync rate.
struct AppFrameModel {
  double work_per_frame_mhz_s = 1.0;
  double target_fps = 60.0;
  int render_pid = 0;
};

struct PowerBreakdown {
  std::map<ClusterId, double> dynamic_w;
  double leakage_w = 0.0;
  double total_w = 0.0;

  double dynamic_total_w() const;
};

/// Demand rescaled by the throughput the cluster actually delivers, saturated
/// at 1: u = min(1, demand * f_big_max / (f * perf_scale)). Work beyond
/// saturation is dropped.
double effective_utilization(double demand_level, const Cluster& cluster,
                             double big_max_frequency_mhz);

/// Capacitive switching power at the current OPP: cap * f * V^2 * sum(u).
/// Utilizations add linearly (one term per process on the cluster).
double dynamic_power(const Cluster& cluster, double total_utilization);

/// min(target_fps, f_gpu * share / work_per_frame) where share is the app's
/// fraction of total GPU utilization. Zero while the app is idle.
double achieved_fps(const AppFrameModel& app, const Cluster& gpu_cluster,
                    double app_utilization_share);

/// Trailing per-process power attribution, one entry per simulation step.
/// Attribution = (process utilization / cluster utilization) * cluster
/// dynamic power; leakage is not attributed.
class PowerHistory {
 public:
  static constexpr double kMaxWindowS = 4.0;  // retention horizon

  explicit PowerHistory(double dt_s) : dt_s_(dt_s) {}

  void push(const std::map<int, double>& attributed_w);
  double dt_s() const { return dt_s_; }
  std::size_t size() const { return steps_.size(); }

  /// Mean attributed power over the trailing window; partial windows average
  /// over whatever samples exist. Throws on a pid never seen.
  double windowed_power_w(int pid, double window_s = 1.0) const;

 private:
  double dt_s_;
  std::deque<std::map<int, double>> steps_;
  std::size_t max_keep_ = 0;
};

}  // namespace thermoloop
