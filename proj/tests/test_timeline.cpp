#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "satoff/geometry.hpp"
#include "satoff/metrics.hpp"
#include "satoff/scenario.hpp"
#include "satoff/timeline.hpp"
#include "test_util.hpp"

using namespace satoff;

namespace {

// Near-static two-satellite bench: zenith SNR calibrated to exactly 0 dB so
// the zenith rate is one bandwidth's worth of bits per second.
ScenarioConfig bench(double bandwidth_hz = 8.0e6, double beta = 20.0, double alpha = 5.0) {
  nlohmann::json d;
  d["name"] = "bench";
  d["tasks"]["sizes_mb"] = {40.0, 10.0};
  auto& con = d["constellation"];
  con["num_satellites"] = 2;
  con["spacing_deg"] = 2.0;
  con["anchor_deg"] = 0.0;
  con["altitude_km"] = 780.0;
  con["earth_radius_km"] = 6371.0;
  con["angular_speed_rad_s"] = 1e-9;
  auto& ch = d["channel"];
  ch["tx_power_w"] = 5.0;
  ch["bandwidth_hz"] = bandwidth_hz;
  ch["noise_power_w"] = 1e-7;
  ch["ref_gain_dbm"] = -50.0;
  ch["calibration_snr_db"] = 0.0;
  auto& cp = d["compute"];
  cp["sat_speed_mb_s"] = beta;
  cp["ue_speed_mb_s"] = alpha;
  cp["cpu_freq_ghz"] = 1.0;
  cp["hardware_factor_w_per_ghz3"] = 0.2;
  cp["isl_rate_mb_s"] = 10000.0;
  auto& pv = d["privacy"];
  pv["location_weight"] = 1.0;
  auto& ob = d["objective"];
  ob["energy_weight"] = 1.0;
  ob["time_threshold_s"] = 200.0;
  ob["failure_threshold"] = 0.01;
  ob["privacy_threshold"] = 0.6;
  return load_scenario_text(d.dump());
}

}  // namespace

TEST_CASE("hand-traced single offload plus one local task") {
  // 40 MB up at ~8e6 b/s: [0,40]; compute at 20 MB/s: [40,42]; no migration;
  // backhaul 4 MB at the same rate: 42 -> 46. Local 10 MB at 5 MB/s fills
  // [40,42]. Radio energy 5 W * 40 s, local CPU 0.2 W * 2 s.
  const ScenarioConfig c = bench();
  const Schedule s = {{0, 1, 0}, {1, 0, 0}};
  const EvaluationReport r = evaluate_schedule(s, c);

  const auto& up = r.tasks[0];
  CHECK(up.upload_start == 0.0);
  CHECK(up.upload_end == doctest::Approx(40.0).epsilon(1e-9));
  CHECK(up.comp_start == up.upload_end);
  CHECK(up.comp_end == doctest::Approx(42.0).epsilon(1e-9));
  CHECK(up.hops == 0);
  CHECK(up.migrate_end == up.comp_end);
  CHECK(up.landing == 1);
  CHECK(up.download_end == doctest::Approx(46.0).epsilon(1e-9));

  const auto& loc = r.tasks[1];
  CHECK(loc.upload_start == loc.comp_start);
  CHECK(loc.comp_start == up.upload_end);
  CHECK(loc.comp_end == doctest::Approx(42.0).epsilon(1e-9));

  CHECK(r.offload_end == up.download_end);
  CHECK(r.local_end == loc.comp_end);
  CHECK(r.total_time == doctest::Approx(46.0).epsilon(1e-9));
  CHECK(r.upload_seconds == doctest::Approx(40.0).epsilon(1e-9));
  CHECK(r.energy == doctest::Approx(200.4).epsilon(1e-9));
  CHECK(r.cost == r.total_time + c.energy_weight * r.energy);
  CHECK(r.transmission_ok);
  CHECK(r.feasible_time);          // 46 < 200
  CHECK_FALSE(r.feasible_reliability);  // unit SNR shreds 3.2e8 bits
  CHECK(r.privacy == doctest::Approx(1.0));  // offload scores 0, local scores 2
}

TEST_CASE("all-local schedule is pure sequential cpu time") {
  const ScenarioConfig c = bench();
  const Schedule s = {{1, 0, 0}, {0, 0, 0}};
  const EvaluationReport r = evaluate_schedule(s, c);
  CHECK(r.total_time == 10.0 / 5.0 + 40.0 / 5.0);
  CHECK(r.tasks[1].comp_start == 0.0);          // schedule order, not id order
  CHECK(r.tasks[0].comp_start == r.tasks[1].comp_end);
  CHECK(r.upload_seconds == 0.0);
  CHECK(r.failure_prob == 0.0);
  CHECK(r.privacy == 1.0 + c.privacy_weight);
  CHECK(r.energy == doctest::Approx(0.2 * 10.0).epsilon(1e-12));  // 0.2 W for 10 s
}

TEST_CASE("second upload to a busy satellite queues behind the first") {
  // slow satellite: uploads [0,40] and [40,50], compute 1: [40,120]; task 2's
  // upload is done at 50 but must wait for the core
  const ScenarioConfig c = bench(8.0e6, 0.5, 5.0);
  const Schedule s = {{0, 1, 0}, {1, 1, 0}};
  const EvaluationReport r = evaluate_schedule(s, c);
  CHECK(r.tasks[0].comp_end == r.tasks[0].comp_start + 40.0 / 0.5);
  CHECK(r.tasks[1].upload_end < r.tasks[0].comp_end);
  CHECK(r.tasks[1].comp_start == r.tasks[0].comp_end);  // exact queue handoff
  CHECK(r.tasks[1].upload_start == r.tasks[0].upload_end);
}

TEST_CASE("upload waits for an invisible target to rise") {
  ScenarioConfig c = bench();
  // place the pair opposite the observer; with the clockwise convention the
  // wait is the closed-form angle gap over the angular speed
  {
    nlohmann::json d = nlohmann::json::parse(save_scenario(c));
    d["constellation"]["anchor_deg"] = 180.0;
    d["constellation"]["angular_speed_rad_s"] = 1e-3;
    c = load_scenario_text(d.dump());
  }
  const Schedule s = {{0, 1, 0}, {1, 0, 0}};
  const EvaluationReport r = evaluate_schedule(s, c);
  const double expected_wait =
      (wrap_angle(c.anchor_rad()) - c.gamma_max_rad()) / c.angular_speed_rad_s;
  CHECK(r.tasks[0].upload_start == expected_wait);
  CHECK(r.transmission_ok);
  // the local task still waits for the radio to finish
  CHECK(r.tasks[1].comp_start == r.tasks[0].upload_end);
}

TEST_CASE("horizon overrun yields the infeasible sentinel") {
  ScenarioConfig c = bench();
  {
    nlohmann::json d = nlohmann::json::parse(save_scenario(c));
    d["constellation"]["anchor_deg"] = 180.0;
    d["constellation"]["angular_speed_rad_s"] = 1e-3;
    d["horizon_s"] = 10.0;  // the pair cannot rise within 10 s
    c = load_scenario_text(d.dump());
  }
  const Schedule s = {{0, 1, 0}, {1, 0, 0}};
  const EvaluationReport r = evaluate_schedule(s, c);
  CHECK_FALSE(r.transmission_ok);
  CHECK(std::isinf(r.cost));
  CHECK(std::isinf(r.total_time));
  CHECK_FALSE(r.feasible());
  CHECK_FALSE(r.feasible_time);
  CHECK_FALSE(r.feasible_reliability);
  CHECK_FALSE(r.feasible_privacy);
  CHECK(std::isinf(r.tasks[0].upload_start));
  CHECK(std::isinf(r.tasks[1].comp_start));  // local chain is starved too
}

TEST_CASE("result migrates clockwise when the server exits the arc") {
  // five satellites, 5 degrees apart, 10-degree visible half-angle; the
  // target starts exactly on the trailing boundary and exits during compute
  nlohmann::json d = nlohmann::json::parse(save_scenario(bench()));
  d["tasks"]["sizes_mb"] = {1.0};
  d["constellation"]["num_satellites"] = 5;
  d["constellation"]["spacing_deg"] = 5.0;
  d["constellation"]["anchor_deg"] = 350.0;
  d["constellation"]["visibility_half_angle_deg"] = 10.0;
  d["constellation"]["angular_speed_rad_s"] = 1e-3;
  d["compute"].erase("sat_speeds_mb_s");
  d["compute"]["sat_speed_mb_s"] = 0.05;  // 20 s of compute
  d.erase("horizon_s");
  const ScenarioConfig c = load_scenario_text(d.dump());

  const Schedule s = {{0, 1, 0}};
  const EvaluationReport r = evaluate_schedule(s, c);
  CHECK(r.tasks[0].upload_start == 0.0);  // boundary counts as visible
  const double g_end = sat_angle(c, 0, r.tasks[0].comp_end);
  REQUIRE_FALSE(is_visible(c, g_end));
  CHECK(g_end > kPi);  // trailing side, clockwise rule applies
  CHECK(r.tasks[0].hops == 1);
  CHECK(r.tasks[0].landing == 2);
  CHECK(r.tasks[0].migrate_end ==
        r.tasks[0].comp_end + 1 * (c.result_ratio * 1.0) / c.isl_rate_mb_s);
  CHECK(r.tasks[0].download_end > r.tasks[0].migrate_end);
}

TEST_CASE("queuing invariants hold on a thousand random schedules") {
  Rng rng(2024);
  int checked = 0;
  int reachable = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + rng.below_int(30);
    const int m = 1 + rng.below_int(25);
    const ScenarioConfig c = testutil::random_config(rng, n, m);
    for (int k = 0; k < 10; ++k) {
      const Schedule s = testutil::random_schedule(rng, n, m);
      const EvaluationReport r = evaluate_schedule(s, c);
      ++checked;
      if (r.transmission_ok) {
        ++reachable;
      } else {
        REQUIRE(std::isinf(r.cost));  // sentinel, never a silent bad number
        REQUIRE_FALSE(r.feasible());
      }

      // per-task phase ordering (unreachable tasks sit at +inf and pass
      // every ordering vacuously)
      double completion_max = 0.0;
      for (const auto& tl : r.tasks) {
        REQUIRE(tl.upload_start >= 0.0);
        REQUIRE(tl.upload_start <= tl.upload_end);
        REQUIRE(tl.upload_end <= tl.comp_start);
        REQUIRE(tl.comp_start <= tl.comp_end);
        REQUIRE(tl.comp_end <= tl.migrate_end);
        REQUIRE(tl.migrate_end <= tl.download_end);
        if (tl.hops == 0) REQUIRE(tl.migrate_end == tl.comp_end);
        completion_max = std::max(completion_max, tl.download_end);
      }

      // uplink exclusivity in schedule order
      double prev_end = 0.0;
      for (const Decision& dd : s) {
        if (dd.location == 0) continue;
        const auto& tl = r.tasks[dd.task];
        REQUIRE(tl.upload_start >= prev_end);
        prev_end = tl.upload_end;
      }

      // per-satellite compute exclusivity, FCFS by upload end
      for (int j = 1; j <= m; ++j) {
        std::vector<const TaskTimeline*> on;
        for (const auto& tl : r.tasks)
          if (tl.location == j) on.push_back(&tl);
        std::sort(on.begin(), on.end(), [](auto* a, auto* b) {
          return a->upload_end < b->upload_end;
        });
        for (std::size_t i = 1; i < on.size(); ++i) {
          REQUIRE(on[i]->comp_start >= on[i - 1]->comp_end);
        }
      }

      // total time per the delay model
      REQUIRE(r.total_time == std::max(r.offload_end, r.local_end));
      REQUIRE(r.total_time == std::max(completion_max, r.local_end));
      REQUIRE(r.cost == r.total_time + c.energy_weight * r.energy);

      // determinism: a second evaluation is bit-identical
      const EvaluationReport r2 = evaluate_schedule(s, c);
      REQUIRE(r2.total_time == r.total_time);
      REQUIRE(r2.cost == r.cost);
      REQUIRE(r2.energy == r.energy);
      REQUIRE(r2.failure_prob == r.failure_prob);
      REQUIRE(r2.privacy == r.privacy);
      for (int i = 0; i < n; ++i) {
        REQUIRE(r2.tasks[i].upload_start == r.tasks[i].upload_start);
        REQUIRE(r2.tasks[i].comp_end == r.tasks[i].comp_end);
        REQUIRE(r2.tasks[i].download_end == r.tasks[i].download_end);
      }
    }
  }
  CHECK(checked == 1000);
  CHECK(reachable > 900);  // the suite must mostly exercise the live path
}

TEST_CASE("malformed schedules are rejected") {
  const ScenarioConfig c = bench();
  CHECK_THROWS_AS(evaluate_schedule({{0, 1, 0}}, c), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_schedule({{0, 1, 0}, {0, 0, 0}}, c), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_schedule({{0, 3, 0}, {1, 0, 0}}, c), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_schedule({{0, 1, 2}, {1, 0, 0}}, c), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_schedule({{0, -1, 0}, {1, 0, 0}}, c), std::invalid_argument);
}
