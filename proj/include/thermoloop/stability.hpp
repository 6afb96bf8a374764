#pragma once

#include <optional>

#include "thermoloop/thermal.hpp"

namespace thermoloop {

/// Auxiliary temperature theta = B / T. Order-reversing bijection with the
/// actual temperature: large theta is cold, small theta is hot.
struct AuxTemperature {
  double theta = 0.0;
};

AuxTemperature to_auxiliary(const ThermalParams& params, double temperature_k);
double from_auxiliary(const ThermalParams& params, AuxTemperature aux);

/// Fixed-point function in the auxiliary domain:
///
///   F(theta) = B - A*theta - G*theta*exp(-theta),  A = T_amb + R*P_dyn,
///                                                  G = R*P_g.
///
/// Roots of F are temperature fixed points. Sign convention: F < 0 means the
/// temperature is rising (theta falling), F > 0 means theta is rising. F is
/// strictly concave for theta > 2.
double fixed_point_function(const ThermalParams& params, double dynamic_power_w,
                            double theta);

enum class Stability { Stable, Marginal, Unstable };

struct FixedPointAnalysis {
  int root_count = 0;  // 0, 1 or 2
  std::optional<double> stable_temperature_k;    // attracting; the larger-theta root
  std::optional<double> unstable_temperature_k;  // repelling; the smaller-theta root
  Stability classification = Stability::Unstable;
};

struct StabilityOptions {
  int grid_points = 4096;
  double ceiling_k = kDefaultRunawayCeilingK;
};

/// theta scan range [max(2 + eps, B/ceiling), B/T_amb]: temperatures between
/// ambient and the runaway ceiling, restricted to the provable concavity
/// region of F.
struct ScanDomain {
  double theta_min = 0.0;
  double theta_max = 0.0;
};
ScanDomain scan_domain(const ThermalParams& params,
                       double ceiling_k = kDefaultRunawayCeilingK);

/// Counts and locates the fixed points of the dynamics at a given dynamic
/// power. Grid scan over the theta domain, sign changes refined by bisection
/// to |dtheta| < 1e-9. Two roots: the lower-temperature one attracts and the
/// higher-temperature one repels. The tangency case is classified Marginal
/// when |P - P_crit| < 1e-6 W.
FixedPointAnalysis analyze_fixed_points(const ThermalParams& params,
                                        double dynamic_power_w,
                                        const StabilityOptions& opts = {});

/// Power at which the two fixed points merge; above it there is no fixed
/// point and the temperature runs away. Bisection on power to |dP| < 1e-6 W.
/// Empty when P_g = 0 (the linear system is stable at every finite power).
std::optional<double> critical_power(const ThermalParams& params,
                                     const StabilityOptions& opts = {});

struct ReachResult {
  enum class Kind { Reached, Unreachable, Runaway } kind = Kind::Unreachable;
  double seconds = 0.0;  // meaningful for Reached only
};

/// Simulates the dynamics from T0 under constant dynamic power and reports
/// the first time |T - stable_T| <= epsilon. Runaway when no fixed point
/// exists or T0 starts beyond the unstable fixed point; Unreachable when the
/// horizon elapses first.
ReachResult time_to_fixed_point(const ThermalParams& params, double initial_temperature_k,
                                double dynamic_power_w, double epsilon_k,
                                double horizon_s = 1000.0, double dt_s = 0.01,
                                const StabilityOptions& opts = {});

}  // namespace thermoloop
