// thermoloop command-line front end. Talks to the simulator exclusively
// through the C API in thermoloop.h.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "thermoloop.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRunaway = 2;

int fail(const std::string& what) {
  std::cerr << "error: " << what << " (" << tl_last_error() << ")\n";
  return kExitUsage;
}

// --params beats THERMOLOOP_PARAMS beats built-in defaults.
tl_status open_params(const std::string& params_path, tl_params** out) {
  if (!params_path.empty()) return tl_params_load(params_path.c_str(), out);
  if (const char* env = std::getenv("THERMOLOOP_PARAMS"); env && *env)
    return tl_params_load(env, out);
  return tl_params_default(out);
}

struct OutStream {
  std::ofstream file;
  std::ostream* out = &std::cout;

  bool open(const std::string& path) {
    if (path.empty()) return true;
    file.open(path);
    if (!file) return false;
    out = &file;
    return true;
  }
};

int run_simulate(const std::string& scenario, const std::string& governor,
                 const std::string& out_path, long long seed, bool has_seed) {
  tl_sim_options opts{};
  opts.governor_override = governor.empty() ? nullptr : governor.c_str();
  opts.seed_override = seed;
  opts.has_seed_override = has_seed ? 1 : 0;

  int runaway = 0;
  if (tl_simulate_file(scenario.c_str(), &opts, out_path.c_str(), &runaway) != TL_OK)
    return fail("simulation failed for " + scenario);
  if (runaway) {
    std::cerr << "thermal runaway: trace truncated at the ceiling\n";
    return kExitRunaway;
  }
  return kExitOk;
}

int run_stability_curve(const std::string& params_path, double power,
                        const std::string& out_path, int samples) {
  tl_params* params = nullptr;
  if (open_params(params_path, &params) != TL_OK) return fail("cannot load parameters");

  double theta_min = 0.0, theta_max = 0.0;
  tl_fixed_points fp{};
  if (tl_scan_domain(params, &theta_min, &theta_max) != TL_OK ||
      tl_analyze_fixed_points(params, power, &fp) != TL_OK) {
    tl_params_free(params);
    return fail("stability analysis failed");
  }

  OutStream os;
  if (!os.open(out_path)) {
    tl_params_free(params);
    return fail("cannot open " + out_path);
  }
  *os.out << "theta,f\n";
  for (int i = 0; i <= samples; ++i) {
    const double theta = theta_min + (theta_max - theta_min) * i / samples;
    double value = 0.0;
    if (tl_fixed_point_function(params, power, theta, &value) != TL_OK) {
      tl_params_free(params);
      return fail("fixed-point function evaluation failed");
    }
    char line[64];
    std::snprintf(line, sizeof(line), "%.9g,%.9g\n", theta, value);
    *os.out << line;
  }
  const char* cls = fp.classification == TL_STABLE     ? "stable"
                    : fp.classification == TL_MARGINAL ? "marginal"
                                                       : "unstable";
  *os.out << "# roots=" << fp.root_count << " classification=" << cls;
  char buf[64];
  if (fp.has_stable) {
    std::snprintf(buf, sizeof(buf), " stable_T_c=%.3f", fp.stable_temperature_k - 273.15);
    *os.out << buf;
  }
  if (fp.has_unstable) {
    std::snprintf(buf, sizeof(buf), " unstable_T_c=%.3f", fp.unstable_temperature_k - 273.15);
    *os.out << buf;
  }
  *os.out << "\n";
  tl_params_free(params);
  return kExitOk;
}

int run_critical_sweep(const std::string& params_path, const std::string& out_path,
                       double max_power, int steps) {
  tl_params* params = nullptr;
  if (open_params(params_path, &params) != TL_OK) return fail("cannot load parameters");

  OutStream os;
  if (!os.open(out_path)) {
    tl_params_free(params);
    return fail("cannot open " + out_path);
  }
  *os.out << "power_w,root_count\n";
  for (int i = 0; i <= steps; ++i) {
    const double p = max_power * i / steps;
    tl_fixed_points fp{};
    if (tl_analyze_fixed_points(params, p, &fp) != TL_OK) {
      tl_params_free(params);
      return fail("fixed-point analysis failed");
    }
    char line[64];
    std::snprintf(line, sizeof(line), "%.6g,%d\n", p, fp.root_count);
    *os.out << line;
  }
  int has_critical = 0;
  double critical = 0.0;
  if (tl_critical_power(params, &has_critical, &critical) != TL_OK) {
    tl_params_free(params);
    return fail("critical power search failed");
  }
  if (has_critical) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "# critical_power_w=%.6f\n", critical);
    *os.out << buf;
  } else {
    *os.out << "# critical_power_w=none\n";
  }
  tl_params_free(params);
  return kExitOk;
}

int run_analyze(const std::string& trace_path, const std::string& cluster,
                const std::string& out_path) {
  tl_trace* trace = nullptr;
  if (tl_trace_load(trace_path.c_str(), &trace) != TL_OK)
    return fail("cannot load trace " + trace_path);

  std::vector<double> freqs(64), percents(64);
  size_t count = 0;
  if (tl_residency_histogram(trace, cluster.c_str(), freqs.data(), percents.data(),
                             freqs.size(), &count) != TL_OK) {
    tl_trace_free(trace);
    return fail("residency histogram failed");
  }
  tl_trace_free(trace);

  OutStream os;
  if (!os.open(out_path)) return fail("cannot open " + out_path);
  *os.out << "freq_mhz,percent\n";
  for (size_t i = 0; i < count && i < freqs.size(); ++i) {
    char line[64];
    std::snprintf(line, sizeof(line), "%.6g,%.4f\n", freqs[i], percents[i]);
    *os.out << line;
  }
  return kExitOk;
}

std::string stem_of(const std::string& path) {
  const size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name.resize(dot);
  return name;
}

int run_report(const std::string& ref, const std::vector<std::string>& runs) {
  std::vector<const char*> paths{ref.c_str()};
  std::vector<std::string> names;
  names.push_back(stem_of(ref));
  for (const std::string& r : runs) {
    paths.push_back(r.c_str());
    names.push_back(stem_of(r));
  }
  std::vector<const char*> name_ptrs;
  for (const std::string& n : names) name_ptrs.push_back(n.c_str());

  char* text = nullptr;
  if (tl_compare_report(paths.data(), name_ptrs.data(), paths.size(), &text) != TL_OK)
    return fail("report failed");
  std::cout << text;
  tl_string_free(text);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"power-thermal SoC simulator"};
  app.require_subcommand(1);

  // simulate
  std::string scenario, governor, trace_out = "trace.csv";
  long long seed = 0;
  auto* sim = app.add_subcommand("simulate", "run a scenario and write its trace");
  sim->add_option("--scenario", scenario, "scenario JSON file")->required();
  sim->add_option("--governor", governor, "override: none|interactive|trip|proposed");
  sim->add_option("--out", trace_out, "trace CSV output path");
  auto* seed_opt = sim->add_option("--seed", seed, "override the scenario seed");

  // stability-curve
  std::string params_path, curve_out;
  double power = 0.0;
  int curve_samples = 512;
  auto* curve = app.add_subcommand("stability-curve", "sample F(theta) at one power");
  curve->add_option("--power", power, "dynamic power in watts")->required()
      ->check(CLI::NonNegativeNumber);
  curve->add_option("--params", params_path, "thermal parameter JSON file");
  curve->add_option("--out", curve_out, "CSV output (default stdout)");
  curve->add_option("--samples", curve_samples, "curve sample count")
      ->check(CLI::PositiveNumber);

  // critical-sweep
  std::string sweep_params, sweep_out;
  double sweep_max = 10.0;
  int sweep_steps = 100;
  auto* sweep = app.add_subcommand("critical-sweep", "root count vs. power plus P_crit");
  sweep->add_option("--params", sweep_params, "thermal parameter JSON file");
  sweep->add_option("--out", sweep_out, "CSV output (default stdout)");
  sweep->add_option("--pmax", sweep_max, "sweep upper bound in watts")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--steps", sweep_steps, "sweep grid steps")->check(CLI::PositiveNumber);

  // analyze
  std::string analyze_trace, analyze_cluster = "gpu", analyze_out;
  auto* analyze = app.add_subcommand("analyze", "frequency residency of a trace");
  analyze->add_option("--trace", analyze_trace, "trace CSV file")->required();
  analyze->add_option("--cluster", analyze_cluster, "little|big|gpu");
  analyze->add_option("--out", analyze_out, "CSV output (default stdout)");

  // report
  std::string report_ref;
  std::vector<std::string> report_runs;
  auto* report = app.add_subcommand("report", "compare runs against a reference trace");
  report->add_option("--ref", report_ref, "reference trace CSV")->required();
  report->add_option("--run", report_runs, "candidate trace CSV (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (sim->parsed())
    return run_simulate(scenario, governor, trace_out, seed, seed_opt->count() > 0);
  if (curve->parsed()) return run_stability_curve(params_path, power, curve_out, curve_samples);
  if (sweep->parsed()) return run_critical_sweep(sweep_params, sweep_out, sweep_max, sweep_steps);
  if (analyze->parsed()) return run_analyze(analyze_trace, analyze_cluster, analyze_out);
  if (report->parsed()) return run_report(report_ref, report_runs);
  return kExitUsage;
}
