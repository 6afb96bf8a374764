#include "thermoloop/thermal.hpp"

#include <cmath>
#include <stdexcept>

namespace thermoloop {

void ThermalParams::validate() const {
  if (!(resistance_k_per_w > 0.0)) throw std::invalid_argument("thermal resistance must be > 0");
  if (!(capacitance_j_per_k > 0.0)) throw std::invalid_argument("thermal capacitance must be > 0");
  if (!(ambient_k > 0.0)) throw std::invalid_argument("ambient temperature must be > 0");
  if (!(leak_activation_k > 0.0)) throw std::invalid_argument("leakage activation must be > 0");
  if (!(leak_prefactor_w >= 0.0)) throw std::invalid_argument("leakage prefactor must be >= 0");
  if (!(leak_activation_k / ambient_k > 2.0))
    throw std::invalid_argument("leak_activation / ambient must exceed 2 (concavity region)");
}

double leakage_power(const ThermalParams& params, double temperature_k) {
  if (!(temperature_k > 0.0)) throw std::invalid_argument("temperature must be > 0");
  return params.leak_prefactor_w * std::exp(-params.leak_activation_k / temperature_k);
}

double temperature_derivative(const ThermalParams& params, double dynamic_power_w,
                              double temperature_k) {
  params.validate();
  if (!(dynamic_power_w >= 0.0)) throw std::invalid_argument("dynamic power must be >= 0");
  const double heat_in = dynamic_power_w + leakage_power(params, temperature_k);
  return (params.ambient_k + params.resistance_k_per_w * heat_in - temperature_k) /
         (params.resistance_k_per_w * params.capacitance_j_per_k);
}

namespace {

// Derivative without revalidating params on every stage evaluation.
inline double rhs(const ThermalParams& p, double power_w, double t_k) {
  const double leak = p.leak_prefactor_w * std::exp(-p.leak_activation_k / t_k);
  return (p.ambient_k + p.resistance_k_per_w * (power_w + leak) - t_k) /
         (p.resistance_k_per_w * p.capacitance_j_per_k);
}

}  // namespace

double rk4_step(const ThermalParams& params, double dynamic_power_w, double temperature_k,
                double dt_s) {
  const double k1 = rhs(params, dynamic_power_w, temperature_k);
  const double k2 = rhs(params, dynamic_power_w, temperature_k + 0.5 * dt_s * k1);
  const double k3 = rhs(params, dynamic_power_w, temperature_k + 0.5 * dt_s * k2);
  const double k4 = rhs(params, dynamic_power_w, temperature_k + dt_s * k3);
  return temperature_k + dt_s / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
}

IntegrationResult integrate(const ThermalParams& params, const PowerSchedule& power,
                            double initial_temperature_k, double dt_s, double duration_s,
                            double ceiling_k) {
  params.validate();
  if (!(dt_s > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(duration_s >= dt_s)) throw std::invalid_argument("duration must be >= dt");
  if (!(initial_temperature_k > 0.0)) throw std::invalid_argument("T0 must be > 0");

  const auto steps = static_cast<std::size_t>(std::floor(duration_s / dt_s));
  IntegrationResult result;
  result.time_s.reserve(steps + 1);
  result.temperature_k.reserve(steps + 1);

  double t_k = initial_temperature_k;
  result.time_s.push_back(0.0);
  result.temperature_k.push_back(t_k);
  if (t_k > ceiling_k) {
    result.runaway = true;
    return result;
  }

  for (std::size_t i = 0; i < steps; ++i) {
    const double t0 = static_cast<double>(i) * dt_s;
    const double k1 = rhs(params, power(t0), t_k);
    const double k2 = rhs(params, power(t0 + 0.5 * dt_s), t_k + 0.5 * dt_s * k1);
    const double k3 = rhs(params, power(t0 + 0.5 * dt_s), t_k + 0.5 * dt_s * k2);
    const double k4 = rhs(params, power(t0 + dt_s), t_k + dt_s * k3);
    t_k += dt_s / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);

    result.time_s.push_back(static_cast<double>(i + 1) * dt_s);
    result.temperature_k.push_back(t_k);
    if (t_k > ceiling_k) {
      result.runaway = true;
      break;
    }
  }
  return result;
}

}  // namespace thermoloop
