#include "thermoloop/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace thermoloop {

namespace {

// Shortest representation that parses back to the identical double.
std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view field, std::size_t line_no, const char* what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw std::runtime_error("trace line " + std::to_string(line_no) + ": bad " +
                             std::string(what) + " field '" + std::string(field) + "'");
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

}  // namespace

void write_trace(const Trace& trace, std::ostream& out, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << kTraceHeader << '\n';
  for (const TraceSample& s : trace.samples) {
    out << format_double(s.t_s) << ',' << format_double(s.temperature_c) << ','
        << format_double(s.f_little_mhz) << ',' << format_double(s.f_big_mhz) << ','
        << format_double(s.f_gpu_mhz) << ',' << format_double(s.p_little_w) << ','
        << format_double(s.p_big_w) << ',' << format_double(s.p_gpu_w) << ','
        << format_double(s.p_leak_w) << ',' << format_double(s.p_total_w) << ','
        << format_double(s.fps) << ',' << s.decision << '\n';
  }
}

void write_trace(const Trace& trace, const std::string& path, const std::string& comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open trace for writing: " + path);
  write_trace(trace, out, comment);
  if (!out.good()) throw std::runtime_error("short write to trace: " + path);
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;  // leading comments
    break;
  }
  if (line_no == 0) throw std::runtime_error("trace line 1: missing header");
  if (line != kTraceHeader)
    throw std::runtime_error("trace line " + std::to_string(line_no) + ": unexpected header '" +
                             line + "'");

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 12)
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": expected 12 fields, got " +
                               std::to_string(fields.size()));
    TraceSample s;
    s.t_s = parse_double(fields[0], line_no, "t_s");
    s.temperature_c = parse_double(fields[1], line_no, "T_c");
    s.f_little_mhz = parse_double(fields[2], line_no, "f_little_mhz");
    s.f_big_mhz = parse_double(fields[3], line_no, "f_big_mhz");
    s.f_gpu_mhz = parse_double(fields[4], line_no, "f_gpu_mhz");
    s.p_little_w = parse_double(fields[5], line_no, "p_little_w");
    s.p_big_w = parse_double(fields[6], line_no, "p_big_w");
    s.p_gpu_w = parse_double(fields[7], line_no, "p_gpu_w");
    s.p_leak_w = parse_double(fields[8], line_no, "p_leak_w");
    s.p_total_w = parse_double(fields[9], line_no, "p_total_w");
    s.fps = parse_double(fields[10], line_no, "fps");
    s.decision = std::string(fields[11]);
    if (s.decision.empty())
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": empty decision field");
    if (!trace.empty() && s.t_s <= trace.samples.back().t_s)
      throw std::runtime_error("trace line " + std::to_string(line_no) +
                               ": t_s is not strictly increasing");
    trace.samples.push_back(std::move(s));
  }
  return trace;
}

Trace read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace: " + path);
  return read_trace(in);
}

double ResidencyHistogram::percent_at(double freq_mhz) const {
  const auto it = percent_by_mhz.find(freq_mhz);
  return it == percent_by_mhz.end() ? 0.0 : it->second;
}

ResidencyHistogram residency_histogram(const Trace& trace, ClusterId cluster) {
  if (trace.empty()) throw std::runtime_error("residency histogram of an empty trace");
  std::map<double, std::size_t> counts;
  for (const TraceSample& s : trace.samples) {
    const double f = cluster == ClusterId::Little  ? s.f_little_mhz
                     : cluster == ClusterId::Big   ? s.f_big_mhz
                                                   : s.f_gpu_mhz;
    ++counts[f];
  }
  ResidencyHistogram hist;
  const double n = static_cast<double>(trace.size());
  for (const auto& [f, c] : counts) hist.percent_by_mhz[f] = 100.0 * static_cast<double>(c) / n;
  return hist;
}

double median_fps(const Trace& trace) {
  if (trace.empty()) throw std::runtime_error("median fps of an empty trace");
  std::vector<double> active;
  active.reserve(trace.size());
  for (const TraceSample& s : trace.samples)
    if (s.fps > 0.0) active.push_back(s.fps);
  if (active.empty()) throw std::runtime_error("median fps: app never active");
  // Lower median for even counts keeps the result deterministic.
  const std::size_t k = (active.size() - 1) / 2;
  std::nth_element(active.begin(), active.begin() + static_cast<std::ptrdiff_t>(k), active.end());
  return active[k];
}

double max_temperature_c(const Trace& trace) {
  if (trace.empty()) throw std::runtime_error("max temperature of an empty trace");
  double best = trace.samples.front().temperature_c;
  for (const TraceSample& s : trace.samples) best = std::max(best, s.temperature_c);
  return best;
}

RunReport summarize_run(const Trace& trace, const std::string& name,
                        double reference_median_fps) {
  if (trace.empty()) throw std::runtime_error("summarize_run: empty trace");
  RunReport r;
  r.name = name;
  r.median_fps = median_fps(trace);
  r.percent_reduction =
      100.0 * (reference_median_fps - r.median_fps) / reference_median_fps;
  r.max_temperature_c = max_temperature_c(trace);

  double little = 0.0, big = 0.0, gpu = 0.0, leak = 0.0;
  for (const TraceSample& s : trace.samples) {
    little += s.p_little_w;
    big += s.p_big_w;
    gpu += s.p_gpu_w;
    leak += s.p_leak_w;
  }
  const double total = little + big + gpu + leak;
  if (total > 0.0) {
    r.little_share = 100.0 * little / total;
    r.big_share = 100.0 * big / total;
    r.gpu_share = 100.0 * gpu / total;
    r.leak_share = 100.0 * leak / total;
  }
  return r;
}

ComparisonReport compare_report(const std::vector<const Trace*>& traces,
                                const std::vector<std::string>& names) {
  if (traces.empty()) throw std::runtime_error("compare_report: no traces");
  if (traces.size() != names.size())
    throw std::runtime_error("compare_report: trace/name count mismatch");

  ComparisonReport report;
  const double ref_fps = median_fps(*traces.front());
  for (std::size_t i = 0; i < traces.size(); ++i)
    report.runs.push_back(summarize_run(*traces[i], names[i], ref_fps));

  std::size_t name_w = 4;
  for (const RunReport& r : report.runs) name_w = std::max(name_w, r.name.size());

  std::ostringstream out;
  out << std::string(name_w - 4, ' ') << "run  median_fps  reduction  max_T_c"
      << "  little%  big%  gpu%  leak%\n";
  char buf[160];
  for (const RunReport& r : report.runs) {
    std::snprintf(buf, sizeof(buf), "%*s  %10.0f  %8.0f%%  %7.1f  %7.1f %5.1f %5.1f %6.1f\n",
                  static_cast<int>(name_w), r.name.c_str(), std::round(r.median_fps),
                  std::round(r.percent_reduction), r.max_temperature_c, r.little_share,
                  r.big_share, r.gpu_share, r.leak_share);
    out << buf;
  }
  report.text = out.str();
  return report;
}

}  // namespace thermoloop
