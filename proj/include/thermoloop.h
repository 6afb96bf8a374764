/* thermoloop C API: power-thermal simulation for a little+big+GPU mobile SoC.
 *
 * Every entry point returns a tl_status; results travel through out
 * parameters. Handles are opaque and freed with their matching _free call.
 * tl_last_error() describes the most recent failure on the calling thread.
 */
#ifndef THERMOLOOP_H
#define THERMOLOOP_H

#include <stddef.h>

#if defined(_WIN32)
#define TL_API __declspec(dllexport)
#else
#define TL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tl_status {
  TL_OK = 0,
  TL_ERR_INVALID_ARGUMENT = 1,
  TL_ERR_PARSE = 2,
  TL_ERR_IO = 3,
  TL_ERR_UNKNOWN_PID = 4,
  TL_ERR_EMPTY_TRACE = 5,
  TL_ERR_INTERNAL = 6
} tl_status;

TL_API const char* tl_status_name(tl_status status);
TL_API const char* tl_last_error(void);

/* ---- thermal model parameters ---------------------------------------- */

typedef struct tl_params tl_params;

TL_API tl_status tl_params_default(tl_params** out);
TL_API tl_status tl_params_create(double resistance_k_per_w, double capacitance_j_per_k,
                                  double ambient_k, double leak_activation_k,
                                  double leak_prefactor_w, tl_params** out);
/* Reads a JSON parameter file (either a bare parameter object or a scenario
 * file; scenario files contribute their "thermal" section). */
TL_API tl_status tl_params_load(const char* path, tl_params** out);
TL_API void tl_params_free(tl_params* params);
TL_API tl_status tl_params_get(const tl_params* params, double* resistance_k_per_w,
                               double* capacitance_j_per_k, double* ambient_k,
                               double* leak_activation_k, double* leak_prefactor_w);

/* ---- thermal dynamics ------------------------------------------------- */

TL_API tl_status tl_leakage_power(const tl_params* params, double temperature_k,
                                  double* watts_out);
TL_API tl_status tl_temperature_derivative(const tl_params* params, double dynamic_power_w,
                                           double temperature_k, double* kelvin_per_s_out);

/* ---- fixed-point stability analysis ----------------------------------- */

typedef enum tl_stability {
  TL_STABLE = 0,
  TL_MARGINAL = 1,
  TL_UNSTABLE = 2
} tl_stability;

typedef struct tl_fixed_points {
  int root_count; /* 0, 1 or 2 */
  int has_stable;
  int has_unstable;
  double stable_temperature_k;
  double unstable_temperature_k;
  tl_stability classification;
} tl_fixed_points;

TL_API tl_status tl_analyze_fixed_points(const tl_params* params, double dynamic_power_w,
                                         tl_fixed_points* out);
/* Auxiliary-domain scan range and the fixed-point function itself, for
 * plotting F(theta) curves. */
TL_API tl_status tl_scan_domain(const tl_params* params, double* theta_min_out,
                                double* theta_max_out);
TL_API tl_status tl_fixed_point_function(const tl_params* params, double dynamic_power_w,
                                         double theta, double* value_out);
/* has_critical=0 when P_g = 0 (stable at every finite power). */
TL_API tl_status tl_critical_power(const tl_params* params, int* has_critical_out,
                                   double* watts_out);

typedef enum tl_reach_kind {
  TL_REACHED = 0,
  TL_UNREACHABLE = 1,
  TL_RUNAWAY = 2
} tl_reach_kind;

TL_API tl_status tl_time_to_fixed_point(const tl_params* params,
                                        double initial_temperature_k,
                                        double dynamic_power_w, double epsilon_k,
                                        tl_reach_kind* kind_out, double* seconds_out);

/* ---- scenario simulation ----------------------------------------------- */

typedef struct tl_sim_options {
  const char* governor_override; /* NULL keeps the scenario's governor */
  long long seed_override;
  int has_seed_override;
} tl_sim_options;

/* Runs a scenario file and writes the trace CSV. *runaway_out is set to 1
 * when the run terminated at the runaway ceiling (the partial trace is still
 * written). opts may be NULL. */
TL_API tl_status tl_simulate_file(const char* scenario_path, const tl_sim_options* opts,
                                  const char* trace_out_path, int* runaway_out);

/* ---- trace analytics --------------------------------------------------- */

typedef struct tl_trace tl_trace;

TL_API tl_status tl_trace_load(const char* path, tl_trace** out);
TL_API void tl_trace_free(tl_trace* trace);
TL_API size_t tl_trace_sample_count(const tl_trace* trace);
TL_API tl_status tl_median_fps(const tl_trace* trace, double* fps_out);
TL_API tl_status tl_max_temperature_c(const tl_trace* trace, double* celsius_out);

/* Frequency residency of one cluster ("little", "big" or "gpu"), ascending
 * by frequency. Returns the number of bins through *count_out; when capacity
 * is too small only the first `capacity` bins are stored (count_out still
 * reports the total). */
TL_API tl_status tl_residency_histogram(const tl_trace* trace, const char* cluster,
                                        double* freq_mhz, double* percent,
                                        size_t capacity, size_t* count_out);

/* Table-style comparison of runs against a reference trace (the first path).
 * *text_out receives a malloc'd string; release it with tl_string_free. */
TL_API tl_status tl_compare_report(const char* const* trace_paths,
                                   const char* const* run_names, size_t run_count,
                                   char** text_out);
TL_API void tl_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* THERMOLOOP_H */
