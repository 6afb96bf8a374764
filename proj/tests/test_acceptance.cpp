// Acceptance suite: eight end-to-end criteria over the calibrated defaults
// and the bundled scenarios. Each criterion prints one pass/fail line.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "thermoloop/governors.hpp"
#include "thermoloop/simulation.hpp"
#include "thermoloop/stability.hpp"
#include "thermoloop/trace.hpp"

using namespace thermoloop;

namespace {

const std::string kScenarioDir = THERMOLOOP_SCENARIO_DIR;

struct Criterion {
  int number;
  const char* title;
  double budget_s;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  bool ok = true;

  void expect(bool condition) { ok = ok && condition; }

  ~Criterion() {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = budget_s <= 0.0 || elapsed < budget_s;
    std::printf("criterion %d %s %s (%.2f s)\n", number, ok && in_budget ? "[PASS]" : "[FAIL]",
                title, elapsed);
    std::fflush(stdout);
  }
};

Scenario load_bundled(const char* name) { return load_scenario(kScenarioDir + "/" + name); }

}  // namespace

TEST_CASE("criterion 1: fixed-point regimes and the 5.5 W critical power") {
  Criterion c{1, "fixed-point regimes, critical power 5.5 +- 0.05 W", 1.0};
  const ThermalParams params;

  const auto at_2w = analyze_fixed_points(params, 2.0);
  c.expect(at_2w.root_count == 2);
  CHECK(at_2w.root_count == 2);

  const auto at_8w = analyze_fixed_points(params, 8.0);
  c.expect(at_8w.root_count == 0);
  CHECK(at_8w.root_count == 0);

  const auto crit = critical_power(params);
  REQUIRE(crit.has_value());
  c.expect(std::abs(*crit - 5.5) <= 0.05);
  CHECK(std::abs(*crit - 5.5) <= 0.05);
}

TEST_CASE("criterion 2: concavity and downward shift of the fixed-point curve") {
  Criterion c{2, "concave F, strictly decreasing in power pointwise", 1.0};
  const ThermalParams params;
  const ScanDomain dom = scan_domain(params);
  const double h = 1e-4;
  const double powers[] = {0.0, 2.0, 5.5, 8.0};

  int points_checked = 0;
  bool concave = true;
  for (const double p : powers) {
    for (int i = 1; i < 1500; ++i) {
      const double theta = dom.theta_min + (dom.theta_max - dom.theta_min) * i / 1500;
      const double second =
          (fixed_point_function(params, p, theta + h) - 2.0 * fixed_point_function(params, p, theta) +
           fixed_point_function(params, p, theta - h)) /
          (h * h);
      concave = concave && second < 0.0;
      ++points_checked;
    }
  }
  c.expect(concave);
  c.expect(points_checked >= 4 * 1000);
  CHECK(concave);

  bool decreasing = true;
  for (int i = 0; i <= 1000; ++i) {
    const double theta = dom.theta_min + (dom.theta_max - dom.theta_min) * i / 1000;
    for (std::size_t k = 1; k < 4; ++k)
      decreasing = decreasing && fixed_point_function(params, powers[k], theta) <
                                     fixed_point_function(params, powers[k - 1], theta);
  }
  c.expect(decreasing);
  CHECK(decreasing);
}

TEST_CASE("criterion 3: trajectories agree with the fixed-point analysis") {
  Criterion c{3, "ODE endpoints match the fixed points, runaway past the unstable root", 5.0};
  const ThermalParams params;
  const auto analysis = analyze_fixed_points(params, 2.0);
  REQUIRE(analysis.root_count == 2);
  const double stable = *analysis.stable_temperature_k;
  const double unstable = *analysis.unstable_temperature_k;
  const double duration = 10.0 * params.time_constant_s();

  const auto from_ambient =
      integrate(params, [](double) { return 2.0; }, params.ambient_k, 0.01, duration);
  c.expect(!from_ambient.runaway);
  c.expect(std::abs(from_ambient.final_temperature_k() - stable) <= 0.1);
  CHECK(std::abs(from_ambient.final_temperature_k() - stable) <= 0.1);

  const auto above =
      integrate(params, [](double) { return 2.0; }, unstable + 1.0, 0.01, 4.0 * duration);
  c.expect(above.runaway);
  c.expect(above.final_temperature_k() > 500.0);
  CHECK(above.runaway);

  const auto below =
      integrate(params, [](double) { return 2.0; }, unstable - 1.0, 0.01, 4.0 * duration);
  c.expect(!below.runaway);
  c.expect(std::abs(below.final_temperature_k() - stable) <= 0.1);
  CHECK_FALSE(below.runaway);
}

TEST_CASE("criterion 4: no-leakage closed form") {
  Criterion c{4, "analytic exponential solution and exact linear fixed point", 5.0};
  ThermalParams params;
  params.leak_prefactor_w = 0.0;
  const double power = 2.0, t0 = 300.0;

  const auto run = integrate(params, [power](double) { return power; }, t0, 0.01, 300.0);
  bool all_match = true;
  for (std::size_t i = 0; i < run.time_s.size(); ++i) {
    const double expected = oracle::analytic_linear_temperature(
        params.resistance_k_per_w, params.capacitance_j_per_k, params.ambient_k, power, t0,
        run.time_s[i]);
    all_match = all_match && std::abs(run.temperature_k[i] - expected) < 1e-3;
  }
  c.expect(all_match);
  CHECK(all_match);

  const auto analysis = analyze_fixed_points(params, power);
  c.expect(analysis.root_count == 1);
  REQUIRE(analysis.stable_temperature_k.has_value());
  c.expect(*analysis.stable_temperature_k ==
           params.ambient_k + params.resistance_k_per_w * power);
  CHECK(*analysis.stable_temperature_k == 320.0);
}

TEST_CASE("criterion 5: governor ordering on the 3DMark-analog scenario") {
  Criterion c{5, "median fps alone >= proposed >= baseline, selective migration", 30.0};

  const SimulationResult alone = run_simulation(load_bundled("3dmark_alone.json"));
  Scenario bml = load_bundled("3dmark_bml.json");
  const SimulationResult baseline = run_simulation(bml);
  bml.governor.kind = GovernorKind::Proposed;
  const SimulationResult proposed = run_simulation(bml);
  REQUIRE_FALSE(alone.runaway);
  REQUIRE_FALSE(baseline.runaway);
  REQUIRE_FALSE(proposed.runaway);

  const double fps_alone = median_fps(alone.trace);
  const double fps_baseline = median_fps(baseline.trace);
  const double fps_proposed = median_fps(proposed.trace);

  c.expect(fps_alone >= fps_proposed);
  c.expect(fps_proposed >= fps_baseline);
  CHECK(fps_alone >= fps_proposed);
  CHECK(fps_proposed >= fps_baseline);

  c.expect(fps_proposed >= 0.95 * fps_alone);
  CHECK(fps_proposed >= 0.95 * fps_alone);
  c.expect(fps_baseline <= 0.95 * fps_alone);
  CHECK(fps_baseline <= 0.95 * fps_alone);

  const double limit_k = bml.governor.proposed.thermal_limit_k;
  c.expect(max_temperature_c(proposed.trace) <= kelvin_to_celsius(limit_k + 0.5));
  CHECK(max_temperature_c(proposed.trace) <= kelvin_to_celsius(limit_k + 0.5));

  int migrates = 0;
  bool only_background = true;
  for (const TraceSample& s : proposed.trace.samples) {
    if (s.decision.rfind("migrate:", 0) == 0) {
      ++migrates;
      only_background = only_background && s.decision == "migrate:100:little";
    }
  }
  c.expect(migrates >= 1);
  c.expect(only_background);
  CHECK(migrates >= 1);
  CHECK(only_background);
}

TEST_CASE("criterion 6: residency collapse under the trip-point baseline") {
  Criterion c{6, "top GPU bins drop to zero, 390 MHz residency rises", 30.0};

  Scenario scenario = load_bundled("paperio_analog.json");
  scenario.governor.kind = GovernorKind::Interactive;
  const SimulationResult unthrottled = run_simulation(scenario);
  scenario.governor.kind = GovernorKind::Trip;
  const SimulationResult throttled = run_simulation(scenario);
  REQUIRE_FALSE(unthrottled.runaway);
  REQUIRE_FALSE(throttled.runaway);

  const auto free_hist = residency_histogram(unthrottled.trace, ClusterId::Gpu);
  const auto trip_hist = residency_histogram(throttled.trace, ClusterId::Gpu);

  const double free_top_two = free_hist.percent_at(510.0) + free_hist.percent_at(600.0);
  c.expect(free_top_two > 10.0);
  CHECK(free_top_two > 10.0);

  c.expect(trip_hist.percent_at(510.0) == 0.0);
  c.expect(trip_hist.percent_at(600.0) == 0.0);
  CHECK(trip_hist.percent_at(510.0) == 0.0);
  CHECK(trip_hist.percent_at(600.0) == 0.0);

  c.expect(trip_hist.percent_at(390.0) > free_hist.percent_at(390.0));
  CHECK(trip_hist.percent_at(390.0) > free_hist.percent_at(390.0));
}

TEST_CASE("criterion 7: power-share shifts from the background task and migration") {
  Criterion c{7, "big share +15 points with background, little share +5 after migration", 30.0};

  const SimulationResult alone = run_simulation(load_bundled("3dmark_alone.json"));
  Scenario bml = load_bundled("3dmark_bml.json");
  const SimulationResult baseline = run_simulation(bml);
  bml.governor.kind = GovernorKind::Proposed;
  const SimulationResult proposed = run_simulation(bml);

  const RunReport alone_report = summarize_run(alone.trace, "alone", 1.0);
  const RunReport baseline_report = summarize_run(baseline.trace, "baseline", 1.0);
  const RunReport proposed_report = summarize_run(proposed.trace, "proposed", 1.0);

  c.expect(baseline_report.big_share - alone_report.big_share >= 15.0);
  CHECK(baseline_report.big_share - alone_report.big_share >= 15.0);

  c.expect(proposed_report.little_share - baseline_report.little_share >= 5.0);
  CHECK(proposed_report.little_share - baseline_report.little_share >= 5.0);
}

TEST_CASE("criterion 8: exemption under fuzz and byte-identical determinism") {
  Criterion c{8, "exempt pid never migrated in 10k ticks, reruns byte-identical", 60.0};

  // Fuzzed governor ticks under a permanent predicted violation.
  const ThermalParams thermal;
  GovernorConfig cfg;
  cfg.thermal_limit_k = 345.0;
  std::vector<Process> procs;
  Process rt;
  rt.pid = 50;
  rt.name = "rt";
  rt.assigned_cluster = ClusterId::Big;
  rt.demand.segments.push_back({1.0, 0.9});
  procs.push_back(rt);
  Process worker = rt;
  worker.pid = 51;
  worker.name = "worker";
  procs.push_back(worker);
  std::set<int> registry{50};

  PowerHistory history(0.1);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> watts(0.0, 5.0);
  std::uniform_real_distribution<double> temps(305.0, 420.0);
  bool exempt_safe = true;
  for (int tick = 0; tick < 10'000; ++tick) {
    history.push({{50, watts(rng)}, {51, watts(rng)}});
    const ProposedTickContext ctx{thermal, temps(rng), 7.0, procs, history, registry};
    const GovernorDecision d = proposed_tick(ctx, cfg);
    if (const auto* m = std::get_if<Migrate>(&d)) exempt_safe = exempt_safe && m->pid != 50;
  }
  c.expect(exempt_safe);
  CHECK(exempt_safe);

  // Same bundled scenario + same seed twice: identical bytes.
  for (const char* name : {"3dmark_bml.json", "paperio_analog.json"}) {
    const Scenario scenario = load_bundled(name);
    std::ostringstream first, second;
    write_trace(run_simulation(scenario).trace, first);
    write_trace(run_simulation(scenario).trace, second);
    c.expect(first.str() == second.str());
    CHECK(first.str() == second.str());
    CHECK(first.str().size() > 100'000);
  }
}
