#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "satoff/units.hpp"

namespace satoff {

// Validated scenario: raw schema values plus resolved defaults. Angles live in
// degrees as in the schema (converted by accessors); everything else is held
// SI-ready. MB/s compute rates divide MB sizes directly into seconds.
struct ScenarioConfig {
  std::string name;

  // tasks
  std::vector<double> task_sizes_mb;

  // constellation
  int num_satellites = 0;
  double spacing_deg = 0.0;
  double anchor_deg = 0.0;
  double altitude_km = 0.0;
  double earth_radius_km = 0.0;
  double angular_speed_rad_s = 0.0;  // resolved (default: Keplerian)
  int motion_sign = -1;              // -1: gamma decreases with time
  double gamma_max_deg = 0.0;        // resolved (default: horizon-limited)

  // channel
  double tx_power_w = 0.0;
  double bandwidth_hz = 0.0;
  double noise_power_w = 0.0;
  double ref_gain_dbm = 0.0;
  double ref_gain_w = 0.0;     // dBm converted at load
  double system_gain = 0.0;    // resolved (default: SNR calibration at zenith)
  double calibration_snr_db = 15.0;

  // compute
  std::vector<double> sat_speeds_mb_s;  // per satellite
  double ue_speed_mb_s = 0.0;
  double cpu_freq_ghz = 0.0;
  double hardware_factor = 0.0;  // watts per GHz^3
  double isl_rate_mb_s = 0.0;
  double result_ratio = 0.0;
  double redundancy_ratio = 0.0;

  // privacy
  double privacy_weight = 0.0;       // weight on location privacy
  double channel_threshold = 0.0;    // resolved omega, linear gain units
  double threshold_angle_deg = 0.0;  // resolved (default: gamma_max/2)

  // objective
  double energy_weight = 0.0;
  double time_threshold_s = 0.0;
  double failure_threshold = 0.0;
  double privacy_threshold = 0.0;
  double reward_constant = 0.0;

  double horizon_s = 0.0;  // resolved (default: one orbital period)
  std::uint64_t rng_seed = 0;

  int num_tasks() const { return static_cast<int>(task_sizes_mb.size()); }
  double task_size_bits(int i) const { return task_sizes_mb[i] * kBitsPerMb; }
  double earth_radius_m() const { return earth_radius_km * 1000.0; }
  double altitude_m() const { return altitude_km * 1000.0; }
  double spacing_rad() const { return spacing_deg * kDegToRad; }
  double anchor_rad() const { return anchor_deg * kDegToRad; }
  double gamma_max_rad() const { return gamma_max_deg * kDegToRad; }
  double sat_speed_mb_s(int j) const { return sat_speeds_mb_s[j]; }
  double comp_power_w() const {  // kappa * f^3, f in GHz
    return hardware_factor * cpu_freq_ghz * cpu_freq_ghz * cpu_freq_ghz;
  }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Parses and validates a scenario document; applies unit conversions and fills
// derived defaults. Throws std::runtime_error naming the offending field.
ScenarioConfig load_scenario_text(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);

// Emits the schema document (raw units, resolved optionals included) such that
// load_scenario_text(save_scenario(c)) == c.
std::string save_scenario(const ScenarioConfig& cfg);

// Stable content hash of the resolved scenario (for output provenance).
std::uint64_t scenario_hash(const ScenarioConfig& cfg);

}  // namespace satoff
