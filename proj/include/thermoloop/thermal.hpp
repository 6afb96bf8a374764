#pragma once

#include <functional>
#include <vector>

namespace thermoloop {

// Leakage prefactor that puts the critical power at 5.5 W with the other
// defaults (solves the tangency system F(theta) = 0, F'(theta) = 0).
inline constexpr double kDefaultLeakPrefactorW = 67649994.88433245;

inline constexpr double kDefaultRunawayCeilingK = 500.0;

/// Lumped RC thermal node with exponentially temperature-dependent leakage:
///
///   dT/dt     = (T_amb + R * (P_dyn + P_leak(T)) - T) / (R * C)
///   P_leak(T) = P_g * exp(-B / T)
///
/// The leakage term closes the positive feedback loop between power and
/// temperature: hotter silicon leaks more, which heats it further.
struct ThermalParams {
  double resistance_k_per_w = 10.0;    // R
  double capacitance_j_per_k = 5.0;    // C
  double ambient_k = 300.0;            // T_amb
  double leak_activation_k = 6500.0;   // B
  double leak_prefactor_w = kDefaultLeakPrefactorW;  // P_g

  // Throws std::invalid_argument. Requires R, C, T_amb, B > 0, P_g >= 0 and
  // B / T_amb > 2 so the auxiliary-domain concavity region covers every
  // reachable temperature.
  void validate() const;

  double time_constant_s() const { return resistance_k_per_w * capacitance_j_per_k; }
};

/// P_g * exp(-B / T); strictly increasing in T for P_g > 0.
double leakage_power(const ThermalParams& params, double temperature_k);

/// Right-hand side of the thermal ODE at a given dynamic power.
double temperature_derivative(const ThermalParams& params, double dynamic_power_w,
                              double temperature_k);

/// One classical RK4 step with the dynamic power held constant over dt.
double rk4_step(const ThermalParams& params, double dynamic_power_w,
                double temperature_k, double dt_s);

using PowerSchedule = std::function<double(double)>;  // time -> dynamic watts

struct IntegrationResult {
  std::vector<double> time_s;
  std::vector<double> temperature_k;
  bool runaway = false;  // trace stopped at the ceiling

  double final_temperature_k() const { return temperature_k.back(); }
};

/// Fixed-step RK4 integration of the thermal ODE. The power schedule is
/// sampled at the RK4 stage times. Terminates early with the runaway flag
/// set once the temperature exceeds the ceiling; otherwise the trace has
/// floor(duration/dt) + 1 samples.
IntegrationResult integrate(const ThermalParams& params, const PowerSchedule& power,
                            double initial_temperature_k, double dt_s, double duration_s,
                            double ceiling_k = kDefaultRunawayCeilingK);

}  // namespace thermoloop
