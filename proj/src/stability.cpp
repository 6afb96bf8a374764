#include "thermoloop/stability.hpp"

#include <cmath>
#include <stdexcept>

namespace thermoloop {

namespace {

constexpr double kThetaTol = 1e-9;
constexpr double kPowerTol = 1e-6;
constexpr double kConcavityEdge = 2.0 + 1e-6;

struct FixedPointCurve {
  double activation;  // B
  double linear;      // A = T_amb + R * P_dyn
  double leak;        // G = R * P_g

  double value(double theta) const {
    return activation - linear * theta - leak * theta * std::exp(-theta);
  }
  double slope(double theta) const {
    return -linear + leak * std::exp(-theta) * (theta - 1.0);
  }
};

FixedPointCurve make_curve(const ThermalParams& p, double dynamic_power_w) {
  return {p.leak_activation_k, p.ambient_k + p.resistance_k_per_w * dynamic_power_w,
          p.resistance_k_per_w * p.leak_prefactor_w};
}

// F' is strictly decreasing on theta > 2, so the maximum of F over the scan
// domain sits at the unique zero of F' (or at an edge).
double argmax_theta(const FixedPointCurve& curve, const ScanDomain& dom) {
  if (curve.slope(dom.theta_min) <= 0.0) return dom.theta_min;
  if (curve.slope(dom.theta_max) >= 0.0) return dom.theta_max;
  double lo = dom.theta_min, hi = dom.theta_max;
  while (hi - lo > kThetaTol) {
    const double mid = 0.5 * (lo + hi);
    (curve.slope(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double bisect_root(const FixedPointCurve& curve, double lo, double hi) {
  // Orient so F(lo) >= 0 >= F(hi) or vice versa; plain bisection.
  const bool rising = curve.value(lo) < 0.0;
  while (hi - lo > kThetaTol) {
    const double mid = 0.5 * (lo + hi);
    const double f = curve.value(mid);
    if ((f < 0.0) == rising)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double peak_value(const ThermalParams& p, double dynamic_power_w, const ScanDomain& dom) {
  const FixedPointCurve curve = make_curve(p, dynamic_power_w);
  return curve.value(argmax_theta(curve, dom));
}

}  // namespace

AuxTemperature to_auxiliary(const ThermalParams& params, double temperature_k) {
  if (!(temperature_k > 0.0)) throw std::invalid_argument("temperature must be > 0");
  return {params.leak_activation_k / temperature_k};
}

double from_auxiliary(const ThermalParams& params, AuxTemperature aux) {
  if (!(aux.theta > 0.0)) throw std::invalid_argument("theta must be > 0");
  return params.leak_activation_k / aux.theta;
}

double fixed_point_function(const ThermalParams& params, double dynamic_power_w,
                            double theta) {
  params.validate();
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be > 0");
  if (!(dynamic_power_w >= 0.0)) throw std::invalid_argument("dynamic power must be >= 0");
  return make_curve(params, dynamic_power_w).value(theta);
}

ScanDomain scan_domain(const ThermalParams& params, double ceiling_k) {
  const double b = params.leak_activation_k;
  return {std::max(kConcavityEdge, b / ceiling_k), b / params.ambient_k};
}

FixedPointAnalysis analyze_fixed_points(const ThermalParams& params, double dynamic_power_w,
                                        const StabilityOptions& opts) {
  params.validate();
  if (!(dynamic_power_w >= 0.0)) throw std::invalid_argument("dynamic power must be >= 0");

  FixedPointAnalysis out;

  if (params.leak_prefactor_w == 0.0) {
    // Linear dynamics: a single globally attracting fixed point.
    out.root_count = 1;
    out.stable_temperature_k = params.ambient_k + params.resistance_k_per_w * dynamic_power_w;
    out.classification = Stability::Stable;
    return out;
  }

  const ScanDomain dom = scan_domain(params, opts.ceiling_k);
  const FixedPointCurve curve = make_curve(params, dynamic_power_w);
  const double theta_peak = argmax_theta(curve, dom);
  const double f_peak = curve.value(theta_peak);
  const double f_lo = curve.value(dom.theta_min);
  const double f_hi = curve.value(dom.theta_max);

  // Within 1e-6 W of the critical power the grid cannot separate the two
  // near-coincident roots; call that the (measure-zero) tangency case.
  const double tangency_band =
      4.0 * kPowerTol * params.resistance_k_per_w * dom.theta_max;
  if (std::abs(f_peak) <= tangency_band) {
    if (auto crit = critical_power(params, opts);
        crit && std::abs(dynamic_power_w - *crit) < kPowerTol) {
      const double t_tangent = params.leak_activation_k / theta_peak;
      out.root_count = 1;
      out.stable_temperature_k = t_tangent;
      out.unstable_temperature_k = t_tangent;
      out.classification = Stability::Marginal;
      return out;
    }
  }

  if (f_lo >= 0.0 && f_hi < 0.0) {
    // The repelling root lies beyond the runaway ceiling; only the
    // attracting one is in reach.
    const double root = bisect_root(curve, dom.theta_min, dom.theta_max);
    out.root_count = 1;
    out.stable_temperature_k = params.leak_activation_k / root;
    out.classification = Stability::Stable;
    return out;
  }

  if (f_peak <= 0.0) {
    out.root_count = 0;
    out.classification = Stability::Unstable;
    return out;
  }

  // Generic two-root regime. Bracket by grid scan; concavity means the scan
  // cannot miss a crossing at the default resolution, and the peak location
  // provides a guaranteed fallback split.
  double lo_bracket_lo = dom.theta_min, lo_bracket_hi = theta_peak;
  double hi_bracket_lo = theta_peak, hi_bracket_hi = dom.theta_max;
  const int n = std::max(8, opts.grid_points);
  double prev_theta = dom.theta_min;
  double prev_f = f_lo;
  int found = 0;
  for (int i = 1; i <= n && found < 2; ++i) {
    const double theta = dom.theta_min + (dom.theta_max - dom.theta_min) * i / n;
    const double f = curve.value(theta);
    if ((prev_f < 0.0) != (f < 0.0)) {
      if (found == 0) {
        lo_bracket_lo = prev_theta;
        lo_bracket_hi = theta;
      } else {
        hi_bracket_lo = prev_theta;
        hi_bracket_hi = theta;
      }
      ++found;
    }
    prev_theta = theta;
    prev_f = f;
  }

  const double theta_small = bisect_root(curve, lo_bracket_lo, lo_bracket_hi);
  const double theta_large = bisect_root(curve, hi_bracket_lo, hi_bracket_hi);

  out.root_count = 2;
  // Larger theta = lower temperature = the attracting fixed point.
  out.stable_temperature_k = params.leak_activation_k / theta_large;
  out.unstable_temperature_k = params.leak_activation_k / theta_small;
  out.classification = Stability::Stable;
  return out;
}

std::optional<double> critical_power(const ThermalParams& params,
                                     const StabilityOptions& opts) {
  params.validate();
  if (params.leak_prefactor_w == 0.0) return std::nullopt;

  const ScanDomain dom = scan_domain(params, opts.ceiling_k);
  if (peak_value(params, 0.0, dom) <= 0.0) return 0.0;  // unstable even when idle

  double lo = 0.0, hi = 1.0;
  while (peak_value(params, hi, dom) > 0.0) {
    hi *= 2.0;
    if (hi > 1e12) return std::nullopt;  // no merge at any sane power
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (peak_value(params, mid, dom) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ReachResult time_to_fixed_point(const ThermalParams& params, double initial_temperature_k,
                                double dynamic_power_w, double epsilon_k, double horizon_s,
                                double dt_s, const StabilityOptions& opts) {
  if (!(initial_temperature_k > 0.0)) throw std::invalid_argument("T0 must be > 0");
  if (!(epsilon_k > 0.0)) throw std::invalid_argument("epsilon must be > 0");

  const FixedPointAnalysis analysis = analyze_fixed_points(params, dynamic_power_w, opts);
  if (analysis.root_count == 0) return {ReachResult::Kind::Runaway, 0.0};

  const double target = *analysis.stable_temperature_k;
  if (analysis.unstable_temperature_k &&
      initial_temperature_k > *analysis.unstable_temperature_k)
    return {ReachResult::Kind::Runaway, 0.0};

  if (std::abs(initial_temperature_k - target) <= epsilon_k)
    return {ReachResult::Kind::Reached, 0.0};

  double t_k = initial_temperature_k;
  const auto steps = static_cast<std::size_t>(std::ceil(horizon_s / dt_s));
  for (std::size_t i = 0; i < steps; ++i) {
    t_k = rk4_step(params, dynamic_power_w, t_k, dt_s);
    if (t_k > opts.ceiling_k) return {ReachResult::Kind::Runaway, 0.0};
    if (std::abs(t_k - target) <= epsilon_k)
      return {ReachResult::Kind::Reached, static_cast<double>(i + 1) * dt_s};
  }
  return {ReachResult::Kind::Unreachable, 0.0};
}

}  // namespace thermoloop
