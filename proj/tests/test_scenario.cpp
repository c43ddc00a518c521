#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "satoff/geometry.hpp"
#include "satoff/scenario.hpp"

using namespace satoff;

namespace {

ScenarioConfig table2() { return load_scenario_file(std::string(SCENARIO_DIR) + "/table2.scenario"); }

std::string minimal_text() {
  return R"({
    "tasks": {"sizes_mb": [40, 20]},
    "constellation": {"num_satellites": 2, "spacing_deg": 2.0, "anchor_deg": 10.0,
                      "altitude_km": 780.0, "earth_radius_km": 6371.0},
    "channel": {"tx_power_w": 5.0, "bandwidth_hz": 8.0e8, "noise_power_w": 1.0e-7,
                "ref_gain_dbm": -50.0},
    "compute": {"sat_speed_mb_s": 45.0, "ue_speed_mb_s": 30.0, "cpu_freq_ghz": 3.0,
                "hardware_factor_w_per_ghz3": 0.2, "isl_rate_mb_s": 10000.0},
    "privacy": {"location_weight": 1.0},
    "objective": {"energy_weight": 1.0, "time_threshold_s": 200.0,
                  "failure_threshold": 0.01, "privacy_threshold": 0.6}
  })";
}

}  // namespace

TEST_CASE("stock scenario carries the advertised raw values") {
  const ScenarioConfig c = table2();
  CHECK(c.num_tasks() == 30);
  CHECK(c.task_sizes_mb[0] == 400.0);
  CHECK(c.task_sizes_mb[1] == 800.0);
  CHECK(c.task_sizes_mb[2] == 1000.0);
  CHECK(c.num_satellites == 25);
  CHECK(c.spacing_deg == 2.0);
  CHECK(c.anchor_deg == 344.0);
  CHECK(c.earth_radius_km == 6371.0);
  CHECK(c.altitude_km == 780.0);
  CHECK(c.tx_power_w == 5.0);
  CHECK(c.bandwidth_hz == 8.0e8);
  CHECK(c.noise_power_w == 1.0e-7);
  CHECK(c.ue_speed_mb_s == 30.0);
  for (int j = 0; j < c.num_satellites; ++j) CHECK(c.sat_speed_mb_s(j) == 45.0);
  CHECK(c.cpu_freq_ghz == 3.0);
  CHECK(c.hardware_factor == 0.2);
  CHECK(c.isl_rate_mb_s == 10000.0);
  CHECK(c.result_ratio == 0.1);
  CHECK(c.redundancy_ratio == 0.1);
  CHECK(c.privacy_weight == 1.0);
  CHECK(c.energy_weight == 1.0);
  CHECK(c.time_threshold_s == 200.0);
  CHECK(c.failure_threshold == 0.01);
  CHECK(c.privacy_threshold == 0.6);
}

TEST_CASE("unit conversions expose SI values") {
  const ScenarioConfig c = table2();
  CHECK(c.earth_radius_m() == 6371000.0);
  CHECK(c.altitude_m() == 780000.0);
  CHECK(c.ref_gain_w == doctest::Approx(1.0e-8).epsilon(1e-14));
  CHECK(c.task_size_bits(0) == 3.2e9);   // 400 MB
  CHECK(c.task_size_bits(2) == 8.0e9);   // 1000 MB
  CHECK(c.spacing_rad() == doctest::Approx(2.0 * kDegToRad).epsilon(1e-15));
  CHECK(c.comp_power_w() == doctest::Approx(5.4).epsilon(1e-12));
}

TEST_CASE("derived defaults match independent high-precision evaluation") {
  const ScenarioConfig c = table2();
  // horizon-limited visible half-angle: arccos(R/(R+H))
  CHECK(c.gamma_max_deg == doctest::Approx(27.010369409224679902).epsilon(1e-13));
  // circular-orbit angular speed at 780 km
  CHECK(c.angular_speed_rad_s == doctest::Approx(1.0440438050906797456e-3).epsilon(1e-13));
  // default horizon is one orbital period
  CHECK(c.horizon_s == kTwoPi / c.angular_speed_rad_s);
  // system gain calibrated so zenith SNR is 15 dB
  CHECK(c.system_gain == doctest::Approx(38478594568928.839712).epsilon(1e-12));
  const double s0 = distance_m(c, 0.0);
  CHECK(snr(c, channel_gain(c, s0)) == doctest::Approx(31.622776601683793320).epsilon(1e-12));
  // default channel threshold equals the gain at half the visible half-angle
  const double s_ref = distance_m(c, 0.5 * c.gamma_max_rad());
  CHECK(c.channel_threshold == channel_gain(c, s_ref));
}

TEST_CASE("round-trip reproduces an identical config") {
  const ScenarioConfig c = table2();
  const ScenarioConfig c2 = load_scenario_text(save_scenario(c));
  CHECK(c2 == c);
  CHECK(save_scenario(c2) == save_scenario(c));
  CHECK(scenario_hash(c2) == scenario_hash(c));

  const ScenarioConfig m = load_scenario_text(minimal_text());
  CHECK(load_scenario_text(save_scenario(m)) == m);
}

TEST_CASE("validation names the offending field") {
  CHECK_THROWS_WITH_AS(load_scenario_text(R"({"tasks": {"sizes_mb": []}})"),
                       doctest::Contains("tasks.sizes_mb"), std::runtime_error);

  std::string bad = minimal_text();
  auto swap = [&](const std::string& from, const std::string& to) {
    std::string s = minimal_text();
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  CHECK_THROWS_WITH_AS(load_scenario_text(swap("\"tx_power_w\": 5.0", "\"tx_power_w\": -5.0")),
                       doctest::Contains("channel.tx_power_w"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_scenario_text(swap("\"num_satellites\": 2", "\"num_satellites\": 0")),
                       doctest::Contains("constellation.num_satellites"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_scenario_text(swap("\"location_weight\": 1.0",
                                               "\"location_weight\": 1.0, \"oops\": 3")),
                       doctest::Contains("privacy.oops"), std::runtime_error);
  CHECK_THROWS(load_scenario_text("not json"));
}

TEST_CASE("per-satellite speed array is honored") {
  std::string s = minimal_text();
  const std::string from = "\"sat_speed_mb_s\": 45.0";
  s.replace(s.find(from), from.size(), "\"sat_speeds_mb_s\": [45.0, 20.0]");
  const ScenarioConfig c = load_scenario_text(s);
  CHECK(c.sat_speed_mb_s(0) == 45.0);
  CHECK(c.sat_speed_mb_s(1) == 20.0);
  CHECK(load_scenario_text(save_scenario(c)) == c);
}

TEST_CASE("scenario hash tracks content") {
  const ScenarioConfig a = load_scenario_text(minimal_text());
  ScenarioConfig b = a;
  b.task_sizes_mb[0] = 41.0;
  CHECK(scenario_hash(a) != scenario_hash(b));
  CHECK(scenario_hash(a) == scenario_hash(load_scenario_text(minimal_text())));
}
