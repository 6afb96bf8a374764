#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "thermoloop/stability.hpp"

using namespace thermoloop;

namespace {

ThermalParams defaults() { return ThermalParams{}; }

ThermalParams no_leak() {
  ThermalParams p;
  p.leak_prefactor_w = 0.0;
  return p;
}

int ulp_distance(double a, double b) {
  int steps = 0;
  while (a != b && steps <= 4) {
    a = std::nextafter(a, b);
    ++steps;
  }
  return steps;
}

}  // namespace

TEST_CASE("auxiliary temperature is theta = B/T") {
  const ThermalParams p = defaults();
  CHECK(to_auxiliary(p, 6500.0).theta == 1.0);
  CHECK(to_auxiliary(p, 325.0).theta == 20.0);
  CHECK(from_auxiliary(p, AuxTemperature{20.0}) == 325.0);
  CHECK_THROWS_AS(to_auxiliary(p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(from_auxiliary(p, AuxTemperature{-1.0}), std::invalid_argument);
}

TEST_CASE("auxiliary round trip within 1 ulp, order reversing") {
  const ThermalParams p = defaults();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> temp(250.0, 450.0);
  for (int i = 0; i < 1000; ++i) {
    const double t = temp(rng);
    CHECK(ulp_distance(from_auxiliary(p, to_auxiliary(p, t)), t) <= 1);
    const double t2 = temp(rng);
    if (t < t2) CHECK(to_auxiliary(p, t).theta > to_auxiliary(p, t2).theta);
  }
}

TEST_CASE("fixed-point function: linear case has the closed-form root") {
  const ThermalParams p = no_leak();
  // F(theta) = B - A*theta, root at theta = B/A, i.e. T = T_amb + R*P.
  const double a = p.ambient_k + p.resistance_k_per_w * 2.0;
  const double root_theta = p.leak_activation_k / a;
  CHECK(fixed_point_function(p, 2.0, root_theta) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fixed_point_function(p, 2.0, root_theta - 1.0) > 0.0);
  CHECK(fixed_point_function(p, 2.0, root_theta + 1.0) < 0.0);
}

TEST_CASE("fixed-point function sign regimes at 2 W and 8 W") {
  const ThermalParams p = defaults();
  const ScanDomain dom = scan_domain(p);

  int sign_changes = 0;
  double prev = fixed_point_function(p, 2.0, dom.theta_min);
  const int n = 20000;
  for (int i = 1; i <= n; ++i) {
    const double theta = dom.theta_min + (dom.theta_max - dom.theta_min) * i / n;
    const double f = fixed_point_function(p, 2.0, theta);
    if ((prev < 0.0) != (f < 0.0)) ++sign_changes;
    prev = f;
  }
  CHECK(sign_changes == 2);

  for (int i = 0; i <= n; ++i) {
    const double theta = dom.theta_min + (dom.theta_max - dom.theta_min) * i / n;
    CHECK(fixed_point_function(p, 8.0, theta) < 0.0);
  }
}

TEST_CASE("concavity: finite-difference second derivative is negative") {
  const ThermalParams p = defaults();
  const ScanDomain dom = scan_domain(p);
  const double h = 1e-4;
  for (const double power : {0.0, 2.0, 5.5, 8.0}) {
    for (int i = 1; i < 1200; ++i) {
      const double theta = dom.theta_min + (dom.theta_max - dom.theta_min) * i / 1200;
      const double second = (fixed_point_function(p, power, theta + h) -
                             2.0 * fixed_point_function(p, power, theta) +
                             fixed_point_function(p, power, theta - h)) /
                            (h * h);
      CHECK(second < 0.0);
    }
  }
}

TEST_CASE("the curve shifts down pointwise as power grows") {
  const ThermalParams p = defaults();
  const ScanDomain dom = scan_domain(p);
  for (int i = 0; i <= 500; ++i) {
    const double theta = dom.theta_min + (dom.theta_max - dom.theta_min) * i / 500;
    CHECK(fixed_point_function(p, 2.0, theta) < fixed_point_function(p, 0.0, theta));
    CHECK(fixed_point_function(p, 5.5, theta) < fixed_point_function(p, 2.0, theta));
    CHECK(fixed_point_function(p, 8.0, theta) < fixed_point_function(p, 5.5, theta));
  }
}

TEST_CASE("fixed-point analysis matches the dense-scan oracle at 2 W") {
  const ThermalParams p = defaults();
  const auto analysis = analyze_fixed_points(p, 2.0);
  REQUIRE(analysis.root_count == 2);
  REQUIRE(analysis.stable_temperature_k.has_value());
  REQUIRE(analysis.unstable_temperature_k.has_value());
  CHECK(analysis.classification == Stability::Stable);

  const auto temps = oracle::fixed_point_temperatures(
      p.resistance_k_per_w, p.ambient_k, p.leak_activation_k, p.leak_prefactor_w, 2.0);
  REQUIRE(temps.size() == 2);
  // Oracle values: ~321.09 K stable, ~410.76 K unstable.
  CHECK(*analysis.stable_temperature_k == doctest::Approx(temps[0]).epsilon(1e-7));
  CHECK(*analysis.unstable_temperature_k == doctest::Approx(temps[1]).epsilon(1e-7));
  CHECK(*analysis.stable_temperature_k == doctest::Approx(321.0).epsilon(2e-3));

  // The stable fixed point owns the larger theta AND the smaller temperature.
  CHECK(*analysis.stable_temperature_k < *analysis.unstable_temperature_k);
  CHECK(to_auxiliary(p, *analysis.stable_temperature_k).theta >
        to_auxiliary(p, *analysis.unstable_temperature_k).theta);
}

TEST_CASE("no fixed points at 8 W") {
  const auto analysis = analyze_fixed_points(defaults(), 8.0);
  CHECK(analysis.root_count == 0);
  CHECK_FALSE(analysis.stable_temperature_k.has_value());
  CHECK_FALSE(analysis.unstable_temperature_k.has_value());
  CHECK(analysis.classification == Stability::Unstable);
}

TEST_CASE("linear case: single root at T_amb + R*P exactly") {
  const auto analysis = analyze_fixed_points(no_leak(), 2.0);
  CHECK(analysis.root_count == 1);
  REQUIRE(analysis.stable_temperature_k.has_value());
  CHECK(*analysis.stable_temperature_k == 320.0);
  CHECK(analysis.classification == Stability::Stable);
  CHECK_FALSE(analysis.unstable_temperature_k.has_value());
}

TEST_CASE("root count regime is monotone in power") {
  // Two roots below the critical power, none above, with the single marginal
  // point exactly at the tangency (the calibration puts it at 5.5 W, which
  // this sweep hits).
  const ThermalParams p = defaults();
  int prev = 2;
  int marginal_hits = 0;
  for (double power = 0.0; power <= 9.0; power += 0.25) {
    const int count = analyze_fixed_points(p, power).root_count;
    if (count == 1) {
      ++marginal_hits;
      CHECK(power == doctest::Approx(5.5));
    }
    CHECK(count <= prev);
    prev = count;
  }
  CHECK(marginal_hits <= 1);
}

TEST_CASE("critical power hits the calibration target") {
  const ThermalParams p = defaults();
  const auto crit = critical_power(p);
  REQUIRE(crit.has_value());

  // Independent route: tangency algebra instead of bisection on root counts.
  const double expected = oracle::critical_power_from_tangency(
      p.resistance_k_per_w, p.ambient_k, p.leak_activation_k, p.leak_prefactor_w);
  CHECK(*crit == doctest::Approx(expected).epsilon(1e-6));
  CHECK(std::abs(*crit - 5.5) < 0.05);

  // Calibration round trip: the prefactor that puts the tangency at 5.5 W is
  // the shipped default.
  const double pg = oracle::calibrate_leak_prefactor(p.resistance_k_per_w, p.ambient_k,
                                                     p.leak_activation_k, 5.5);
  CHECK(pg == doctest::Approx(p.leak_prefactor_w).epsilon(1e-9));
}

TEST_CASE("root counts flip across the critical power") {
  const ThermalParams p = defaults();
  const double crit = *critical_power(p);
  CHECK(analyze_fixed_points(p, crit - 0.01).root_count == 2);
  CHECK(analyze_fixed_points(p, crit + 0.01).root_count == 0);
}

TEST_CASE("tangency power classifies as marginal") {
  const ThermalParams p = defaults();
  const double crit = *critical_power(p);
  const auto analysis = analyze_fixed_points(p, crit);
  CHECK(analysis.root_count == 1);
  CHECK(analysis.classification == Stability::Marginal);
  REQUIRE(analysis.stable_temperature_k.has_value());
  REQUIRE(analysis.unstable_temperature_k.has_value());
  CHECK(*analysis.stable_temperature_k == doctest::Approx(*analysis.unstable_temperature_k));
}

TEST_CASE("no critical power without leakage") {
  CHECK_FALSE(critical_power(no_leak()).has_value());
}

TEST_CASE("doubling the thermal resistance lowers the critical power") {
  ThermalParams p = defaults();
  const double base = *critical_power(p);
  p.resistance_k_per_w *= 2.0;
  const auto doubled = critical_power(p);
  REQUIRE(doubled.has_value());
  CHECK(*doubled < base);
  // Cross-check against the tangency-algebra oracle.
  CHECK(*doubled == doctest::Approx(oracle::critical_power_from_tangency(
                        p.resistance_k_per_w, p.ambient_k, p.leak_activation_k,
                        p.leak_prefactor_w))
                        .epsilon(1e-6));
}

TEST_CASE("attraction basin: trajectories between the roots converge") {
  const ThermalParams p = defaults();
  const auto analysis = analyze_fixed_points(p, 2.0);
  const double stable = *analysis.stable_temperature_k;
  const double unstable = *analysis.unstable_temperature_k;
  for (const double t0 : {stable - 20.0, stable - 5.0, stable + 10.0, unstable - 1.0}) {
    const auto run = integrate(p, [](double) { return 2.0; }, t0, 0.01,
                               20.0 * p.time_constant_s());
    CHECK_FALSE(run.runaway);
    CHECK(std::abs(run.final_temperature_k() - stable) < 0.1);
  }
}

TEST_CASE("repulsion: one kelvin past the unstable root runs away") {
  const ThermalParams p = defaults();
  const double unstable = *analyze_fixed_points(p, 2.0).unstable_temperature_k;
  const auto run = integrate(p, [](double) { return 2.0; }, unstable + 1.0, 0.01,
                             40.0 * p.time_constant_s());
  CHECK(run.runaway);
}

TEST_CASE("time to fixed point") {
  const ThermalParams p = defaults();
  const double stable = *analyze_fixed_points(p, 2.0).stable_temperature_k;

  SUBCASE("already there") {
    const auto r = time_to_fixed_point(p, stable, 2.0, 0.5);
    CHECK(r.kind == ReachResult::Kind::Reached);
    CHECK(r.seconds == 0.0);
  }
  SUBCASE("from ambient, self-consistent with the integrator") {
    const auto r = time_to_fixed_point(p, 300.0, 2.0, 0.5);
    REQUIRE(r.kind == ReachResult::Kind::Reached);
    CHECK(r.seconds > 0.0);
    const auto replay = integrate(p, [](double) { return 2.0; }, 300.0, 0.01, r.seconds + 0.005);
    CHECK(std::abs(replay.final_temperature_k() - stable) <= 0.5 + 1e-9);
  }
  SUBCASE("above critical power everything runs away") {
    CHECK(time_to_fixed_point(p, 300.0, 8.0, 0.5).kind == ReachResult::Kind::Runaway);
    CHECK(time_to_fixed_point(p, 450.0, 8.0, 0.5).kind == ReachResult::Kind::Runaway);
  }
  SUBCASE("starting beyond the unstable root is the runaway side") {
    const double unstable = *analyze_fixed_points(p, 2.0).unstable_temperature_k;
    CHECK(time_to_fixed_point(p, unstable + 1.0, 2.0, 0.5).kind ==
          ReachResult::Kind::Runaway);
  }
  SUBCASE("tiny epsilon over a short horizon is unreachable") {
    const auto r = time_to_fixed_point(p, 300.0, 2.0, 1e-9, 1.0);
    CHECK(r.kind == ReachResult::Kind::Unreachable);
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(time_to_fixed_point(p, 0.0, 2.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(time_to_fixed_point(p, 300.0, 2.0, 0.0), std::invalid_argument);
  }
}
