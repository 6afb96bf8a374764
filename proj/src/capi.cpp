#include "thermoloop.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "thermoloop/scenario.hpp"
#include "thermoloop/simulation.hpp"
#include "thermoloop/stability.hpp"
#include "thermoloop/trace.hpp"

using namespace thermoloop;

struct tl_params {
  ThermalParams cpp;
};
struct tl_trace {
  Trace cpp;
};

namespace {

thread_local std::string g_last_error;

tl_status set_error(tl_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Maps core exceptions onto status codes; parse/config errors keep their
// field diagnostics in tl_last_error().
template <typename Fn>
tl_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ScenarioError& e) {
    return set_error(TL_ERR_PARSE, e.what());
  } catch (const std::invalid_argument& e) {
    return set_error(TL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::runtime_error& e) {
    return set_error(TL_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return set_error(TL_ERR_INTERNAL, e.what());
  }
}

tl_status require(bool ok, const char* what) {
  return ok ? TL_OK : set_error(TL_ERR_INVALID_ARGUMENT, what);
}

}  // namespace

extern "C" {

const char* tl_status_name(tl_status status) {
  switch (status) {
    case TL_OK: return "ok";
    case TL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TL_ERR_PARSE: return "parse error";
    case TL_ERR_IO: return "io error";
    case TL_ERR_UNKNOWN_PID: return "unknown pid";
    case TL_ERR_EMPTY_TRACE: return "empty trace";
    case TL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* tl_last_error(void) { return g_last_error.c_str(); }

tl_status tl_params_default(tl_params** out) {
  if (tl_status s = require(out != nullptr, "null out pointer")) return s;
  *out = new tl_params{ThermalParams{}};
  return TL_OK;
}

tl_status tl_params_create(double resistance_k_per_w, double capacitance_j_per_k,
                           double ambient_k, double leak_activation_k,
                           double leak_prefactor_w, tl_params** out) {
  if (tl_status s = require(out != nullptr, "null out pointer")) return s;
  return guarded([&] {
    ThermalParams p{resistance_k_per_w, capacitance_j_per_k, ambient_k, leak_activation_k,
                    leak_prefactor_w};
    p.validate();
    *out = new tl_params{p};
    return TL_OK;
  });
}

tl_status tl_params_load(const char* path, tl_params** out) {
  if (tl_status s = require(path && out, "null argument")) return s;
  return guarded([&] {
    *out = new tl_params{load_thermal_params(path)};
    return TL_OK;
  });
}

void tl_params_free(tl_params* params) { delete params; }

tl_status tl_params_get(const tl_params* params, double* resistance_k_per_w,
                        double* capacitance_j_per_k, double* ambient_k,
                        double* leak_activation_k, double* leak_prefactor_w) {
  if (tl_status s = require(params != nullptr, "null params")) return s;
  if (resistance_k_per_w) *resistance_k_per_w = params->cpp.resistance_k_per_w;
  if (capacitance_j_per_k) *capacitance_j_per_k = params->cpp.capacitance_j_per_k;
  if (ambient_k) *ambient_k = params->cpp.ambient_k;
  if (leak_activation_k) *leak_activation_k = params->cpp.leak_activation_k;
  if (leak_prefactor_w) *leak_prefactor_w = params->cpp.leak_prefactor_w;
  return TL_OK;
}

tl_status tl_leakage_power(const tl_params* params, double temperature_k, double* watts_out) {
  if (tl_status s = require(params && watts_out, "null argument")) return s;
  return guarded([&] {
    *watts_out = leakage_power(params->cpp, temperature_k);
    return TL_OK;
  });
}

tl_status tl_temperature_derivative(const tl_params* params, double dynamic_power_w,
                                    double temperature_k, double* kelvin_per_s_out) {
  if (tl_status s = require(params && kelvin_per_s_out, "null argument")) return s;
  return guarded([&] {
    *kelvin_per_s_out = temperature_derivative(params->cpp, dynamic_power_w, temperature_k);
    return TL_OK;
  });
}

tl_status tl_analyze_fixed_points(const tl_params* params, double dynamic_power_w,
                                  tl_fixed_points* out) {
  if (tl_status s = require(params && out, "null argument")) return s;
  return guarded([&] {
    const FixedPointAnalysis a = analyze_fixed_points(params->cpp, dynamic_power_w);
    out->root_count = a.root_count;
    out->has_stable = a.stable_temperature_k.has_value();
    out->has_unstable = a.unstable_temperature_k.has_value();
    out->stable_temperature_k = a.stable_temperature_k.value_or(0.0);
    out->unstable_temperature_k = a.unstable_temperature_k.value_or(0.0);
    out->classification = a.classification == Stability::Stable     ? TL_STABLE
                          : a.classification == Stability::Marginal ? TL_MARGINAL
                                                                    : TL_UNSTABLE;
    return TL_OK;
  });
}

tl_status tl_scan_domain(const tl_params* params, double* theta_min_out,
                         double* theta_max_out) {
  if (tl_status s = require(params && theta_min_out && theta_max_out, "null argument"))
    return s;
  return guarded([&] {
    params->cpp.validate();
    const ScanDomain d = scan_domain(params->cpp);
    *theta_min_out = d.theta_min;
    *theta_max_out = d.theta_max;
    return TL_OK;
  });
}

tl_status tl_fixed_point_function(const tl_params* params, double dynamic_power_w,
                                  double theta, double* value_out) {
  if (tl_status s = require(params && value_out, "null argument")) return s;
  return guarded([&] {
    *value_out = fixed_point_function(params->cpp, dynamic_power_w, theta);
    return TL_OK;
  });
}

tl_status tl_critical_power(const tl_params* params, int* has_critical_out,
                            double* watts_out) {
  if (tl_status s = require(params && has_critical_out && watts_out, "null argument"))
    return s;
  return guarded([&] {
    const auto crit = critical_power(params->cpp);
    *has_critical_out = crit.has_value();
    *watts_out = crit.value_or(0.0);
    return TL_OK;
  });
}

tl_status tl_time_to_fixed_point(const tl_params* params, double initial_temperature_k,
                                 double dynamic_power_w, double epsilon_k,
                                 tl_reach_kind* kind_out, double* seconds_out) {
  if (tl_status s = require(params && kind_out && seconds_out, "null argument")) return s;
  return guarded([&] {
    const ReachResult r =
        time_to_fixed_point(params->cpp, initial_temperature_k, dynamic_power_w, epsilon_k);
    *kind_out = r.kind == ReachResult::Kind::Reached       ? TL_REACHED
                : r.kind == ReachResult::Kind::Unreachable ? TL_UNREACHABLE
                                                           : TL_RUNAWAY;
    *seconds_out = r.seconds;
    return TL_OK;
  });
}

tl_status tl_simulate_file(const char* scenario_path, const tl_sim_options* opts,
                           const char* trace_out_path, int* runaway_out) {
  if (tl_status s = require(scenario_path != nullptr, "null scenario path")) return s;
  return guarded([&] {
    Scenario scenario = load_scenario(scenario_path);
    if (opts && opts->governor_override) {
      const auto kind = governor_from_string(opts->governor_override);
      if (!kind)
        return set_error(TL_ERR_INVALID_ARGUMENT,
                         std::string("unknown governor '") + opts->governor_override + "'");
      scenario.governor.kind = *kind;
    }
    if (opts && opts->has_seed_override)
      scenario.seed = static_cast<std::uint64_t>(opts->seed_override);

    const SimulationResult result = run_simulation(scenario);
    if (trace_out_path)
      write_trace(result.trace, std::string(trace_out_path),
                  "seed=" + std::to_string(scenario.seed));
    if (runaway_out) *runaway_out = result.runaway ? 1 : 0;
    return TL_OK;
  });
}

tl_status tl_trace_load(const char* path, tl_trace** out) {
  if (tl_status s = require(path && out, "null argument")) return s;
  return guarded([&] {
    *out = new tl_trace{read_trace(std::string(path))};
    return TL_OK;
  });
}

void tl_trace_free(tl_trace* trace) { delete trace; }

size_t tl_trace_sample_count(const tl_trace* trace) {
  return trace ? trace->cpp.size() : 0;
}

tl_status tl_median_fps(const tl_trace* trace, double* fps_out) {
  if (tl_status s = require(trace && fps_out, "null argument")) return s;
  if (trace->cpp.empty()) return set_error(TL_ERR_EMPTY_TRACE, "trace has no samples");
  return guarded([&] {
    *fps_out = median_fps(trace->cpp);
    return TL_OK;
  });
}

tl_status tl_max_temperature_c(const tl_trace* trace, double* celsius_out) {
  if (tl_status s = require(trace && celsius_out, "null argument")) return s;
  if (trace->cpp.empty()) return set_error(TL_ERR_EMPTY_TRACE, "trace has no samples");
  return guarded([&] {
    *celsius_out = max_temperature_c(trace->cpp);
    return TL_OK;
  });
}

tl_status tl_residency_histogram(const tl_trace* trace, const char* cluster,
                                 double* freq_mhz, double* percent, size_t capacity,
                                 size_t* count_out) {
  if (tl_status s = require(trace && cluster && count_out, "null argument")) return s;
  const auto id = cluster_from_string(cluster);
  if (!id)
    return set_error(TL_ERR_INVALID_ARGUMENT,
                     std::string("unknown cluster '") + cluster + "'");
  if (trace->cpp.empty()) return set_error(TL_ERR_EMPTY_TRACE, "trace has no samples");
  return guarded([&] {
    const ResidencyHistogram hist = residency_histogram(trace->cpp, *id);
    *count_out = hist.percent_by_mhz.size();
    size_t i = 0;
    for (const auto& [f, pct] : hist.percent_by_mhz) {
      if (i >= capacity) break;
      if (freq_mhz) freq_mhz[i] = f;
      if (percent) percent[i] = pct;
      ++i;
    }
    return TL_OK;
  });
}

tl_status tl_compare_report(const char* const* trace_paths, const char* const* run_names,
                            size_t run_count, char** text_out) {
  if (tl_status s = require(trace_paths && run_names && text_out && run_count > 0,
                            "need at least one trace"))
    return s;
  return guarded([&] {
    std::vector<Trace> traces;
    std::vector<const Trace*> ptrs;
    std::vector<std::string> names;
    traces.reserve(run_count);
    for (size_t i = 0; i < run_count; ++i) {
      traces.push_back(read_trace(std::string(trace_paths[i])));
      names.emplace_back(run_names[i]);
    }
    for (const Trace& t : traces) {
      if (t.empty()) return set_error(TL_ERR_EMPTY_TRACE, "trace has no samples");
      ptrs.push_back(&t);
    }
    const ComparisonReport report = compare_report(ptrs, names);
    *text_out = static_cast<char*>(std::malloc(report.text.size() + 1));
    if (!*text_out) return set_error(TL_ERR_INTERNAL, "out of memory");
    std::memcpy(*text_out, report.text.c_str(), report.text.size() + 1);
    return TL_OK;
  });
}

void tl_string_free(char* text) { std::free(text); }

}  // extern "C"
