#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "thermoloop/platform.hpp"

namespace thermoloop {

inline constexpr double kCelsiusOffset = 273.15;

inline double kelvin_to_celsius(double k) { return k - kCelsiusOffset; }
inline double celsius_to_kelvin(double c) { return c + kCelsiusOffset; }

/// One simulation step. Temperatures are stored in degrees Celsius, matching
/// the on-disk trace format.
struct TraceSample {
  double t_s = 0.0;
  double temperature_c = 0.0;
  double f_little_mhz = 0.0;
  double f_big_mhz = 0.0;
  double f_gpu_mhz = 0.0;
  double p_little_w = 0.0;
  double p_big_w = 0.0;
  double p_gpu_w = 0.0;
  double p_leak_w = 0.0;
  double p_total_w = 0.0;
  double fps = 0.0;
  std::string decision = "none";
  std::map<int, ClusterId> mapping;  // pid -> cluster; not serialized
};

struct Trace {
  std::vector<TraceSample> samples;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
};

inline constexpr const char* kTraceHeader =
    "t_s,T_c,f_little_mhz,f_big_mhz,f_gpu_mhz,p_little_w,p_big_w,p_gpu_w,"
    "p_leak_w,p_total_w,fps,decision";

/// CSV writer. Numbers are emitted with shortest round-trip formatting, so
/// read_trace(write_trace(t)) reproduces every field exactly. A non-empty
/// comment (the run seed, typically) lands on a leading '#' line.
void write_trace(const Trace& trace, std::ostream& out, const std::string& comment = "");
void write_trace(const Trace& trace, const std::string& path, const std::string& comment = "");

/// CSV reader; skips leading '#' comment lines; malformed input or
/// non-increasing timestamps raise std::runtime_error naming the 1-based
/// line number.
Trace read_trace(std::istream& in);
Trace read_trace(const std::string& path);

/// Percent of samples spent at each frequency of one cluster.
struct ResidencyHistogram {
  std::map<double, double> percent_by_mhz;

  double percent_at(double freq_mhz) const;
};

ResidencyHistogram residency_histogram(const Trace& trace, ClusterId cluster);

/// Median FPS over the samples where the app was active (fps > 0). Even
/// sample counts take the lower median so the result is deterministic.
double median_fps(const Trace& trace);

double max_temperature_c(const Trace& trace);

struct RunReport {
  std::string name;
  double median_fps = 0.0;
  double percent_reduction = 0.0;  // vs. reference, 100*(ref-run)/ref
  double max_temperature_c = 0.0;
  // Mean power share per component, percent of total (leakage is a
  // component of its own).
  double little_share = 0.0;
  double big_share = 0.0;
  double gpu_share = 0.0;
  double leak_share = 0.0;
};

RunReport summarize_run(const Trace& trace, const std::string& name,
                        double reference_median_fps);

/// Run comparison: the first trace is the reference the reduction column is
/// computed against. Returns the reports plus an aligned plain-text table
/// (FPS and percentages rounded to integers).
struct ComparisonReport {
  std::vector<RunReport> runs;
  std::string text;
};

ComparisonReport compare_report(const std::vector<const Trace*>& traces,
                                const std::vector<std::string>& names);

}  // namespace thermoloop
