#include "satoff/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "satoff/geometry.hpp"

namespace satoff {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw std::runtime_error("scenario: " + field + ": " + why);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

double num(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

double req_num(const json& obj, const std::string& path, const char* key) {
  return num(require(obj, path, key), path + "." + key);
}

double opt_num(const json& obj, const std::string& path, const char* key, double dflt) {
  auto it = obj.find(key);
  if (it == obj.end()) return dflt;
  return num(*it, path + "." + key);
}

int req_int(const json& obj, const std::string& path, const char* key) {
  const json& v = require(obj, path, key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

void positive(double x, const std::string& field) {
  if (!(x > 0.0) || !std::isfinite(x)) fail(field, "must be strictly positive");
}

void in_unit_interval(double x, const std::string& field) {
  if (!(x >= 0.0 && x <= 1.0)) fail(field, "must lie in [0, 1]");
}

}  // namespace

ScenarioConfig load_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("scenario: parse error: ") + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("scenario: top level must be an object");
  check_keys(doc, "",
             {"name", "description", "rng_seed", "horizon_s", "tasks", "constellation",
              "channel", "compute", "privacy", "objective"});

  ScenarioConfig c;
  c.name = doc.value("name", std::string{});

  // tasks
  const json& tasks = require(doc, "", "tasks");
  check_keys(tasks, "tasks", {"sizes_mb"});
  const json& sizes = require(tasks, "tasks", "sizes_mb");
  if (!sizes.is_array() || sizes.empty()) fail("tasks.sizes_mb", "expected a non-empty array");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double d = num(sizes[i], "tasks.sizes_mb[" + std::to_string(i) + "]");
    positive(d, "tasks.sizes_mb[" + std::to_string(i) + "]");
    c.task_sizes_mb.push_back(d);
  }

  // constellation
  const json& con = require(doc, "", "constellation");
  check_keys(con, "constellation",
             {"num_satellites", "spacing_deg", "anchor_deg", "altitude_km",
              "earth_radius_km", "angular_speed_rad_s", "motion_sign",
              "visibility_half_angle_deg"});
  c.num_satellites = req_int(con, "constellation", "num_satellites");
  if (c.num_satellites < 1) fail("constellation.num_satellites", "must be at least 1");
  c.spacing_deg = req_num(con, "constellation", "spacing_deg");
  positive(c.spacing_deg, "constellation.spacing_deg");
  c.anchor_deg = req_num(con, "constellation", "anchor_deg");
  c.altitude_km = req_num(con, "constellation", "altitude_km");
  positive(c.altitude_km, "constellation.altitude_km");
  c.earth_radius_km = req_num(con, "constellation", "earth_radius_km");
  positive(c.earth_radius_km, "constellation.earth_radius_km");
  if (con.contains("motion_sign")) {
    const json& ms = con["motion_sign"];
    if (!ms.is_number_integer() || (ms.get<int>() != -1 && ms.get<int>() != 1))
      fail("constellation.motion_sign", "must be -1 or 1");
    c.motion_sign = ms.get<int>();
  }

  // visibility: horizon-limited line of sight unless overridden
  const double r_km = c.earth_radius_km;
  const double q_km = c.earth_radius_km + c.altitude_km;
  c.gamma_max_deg = opt_num(con, "constellation", "visibility_half_angle_deg",
                            std::acos(r_km / q_km) * kRadToDeg);
  if (!(c.gamma_max_deg > 0.0 && c.gamma_max_deg <= 90.0))
    fail("constellation.visibility_half_angle_deg", "must lie in (0, 90]");

  // angular speed: circular Keplerian orbit unless overridden
  const double q_m = q_km * 1000.0;
  c.angular_speed_rad_s = opt_num(con, "constellation", "angular_speed_rad_s",
                                  std::sqrt(kMuEarth / (q_m * q_m * q_m)));
  positive(c.angular_speed_rad_s, "constellation.angular_speed_rad_s");

  // channel
  const json& ch = require(doc, "", "channel");
  check_keys(ch, "channel",
             {"tx_power_w", "bandwidth_hz", "noise_power_w", "ref_gain_dbm", "system_gain",
              "calibration_snr_db"});
  c.tx_power_w = req_num(ch, "channel", "tx_power_w");
  positive(c.tx_power_w, "channel.tx_power_w");
  c.bandwidth_hz = req_num(ch, "channel", "bandwidth_hz");
  positive(c.bandwidth_hz, "channel.bandwidth_hz");
  c.noise_power_w = req_num(ch, "channel", "noise_power_w");
  positive(c.noise_power_w, "channel.noise_power_w");
  c.ref_gain_dbm = req_num(ch, "channel", "ref_gain_dbm");
  c.ref_gain_w = std::pow(10.0, (c.ref_gain_dbm - 30.0) / 10.0);
  c.calibration_snr_db = opt_num(ch, "channel", "calibration_snr_db", 15.0);
  // default system gain: lift the zenith-pass SNR to the calibration target
  const double h_m = c.altitude_m();
  c.system_gain = opt_num(ch, "channel", "system_gain",
                          std::pow(10.0, c.calibration_snr_db / 10.0) * c.noise_power_w *
                              h_m * h_m / (c.tx_power_w * c.ref_gain_w));
  positive(c.system_gain, "channel.system_gain");

  // compute
  const json& cp = require(doc, "", "compute");
  check_keys(cp, "compute",
             {"sat_speed_mb_s", "sat_speeds_mb_s", "ue_speed_mb_s", "cpu_freq_ghz",
              "hardware_factor_w_per_ghz3", "isl_rate_mb_s", "result_ratio",
              "redundancy_ratio"});
  if (cp.contains("sat_speeds_mb_s")) {
    const json& arr = cp["sat_speeds_mb_s"];
    if (!arr.is_array() || static_cast<int>(arr.size()) != c.num_satellites)
      fail("compute.sat_speeds_mb_s", "expected an array of num_satellites entries");
    for (std::size_t j = 0; j < arr.size(); ++j) {
      const std::string f = "compute.sat_speeds_mb_s[" + std::to_string(j) + "]";
      const double s = num(arr[j], f);
      positive(s, f);
      c.sat_speeds_mb_s.push_back(s);
    }
  } else {
    const double s = req_num(cp, "compute", "sat_speed_mb_s");
    positive(s, "compute.sat_speed_mb_s");
    c.sat_speeds_mb_s.assign(c.num_satellites, s);
  }
  c.ue_speed_mb_s = req_num(cp, "compute", "ue_speed_mb_s");
  positive(c.ue_speed_mb_s, "compute.ue_speed_mb_s");
  c.cpu_freq_ghz = req_num(cp, "compute", "cpu_freq_ghz");
  positive(c.cpu_freq_ghz, "compute.cpu_freq_ghz");
  c.hardware_factor = req_num(cp, "compute", "hardware_factor_w_per_ghz3");
  positive(c.hardware_factor, "compute.hardware_factor_w_per_ghz3");
  c.isl_rate_mb_s = req_num(cp, "compute", "isl_rate_mb_s");
  positive(c.isl_rate_mb_s, "compute.isl_rate_mb_s");
  c.result_ratio = opt_num(cp, "compute", "result_ratio", 0.1);
  in_unit_interval(c.result_ratio, "compute.result_ratio");
  c.redundancy_ratio = opt_num(cp, "compute", "redundancy_ratio", 0.1);
  in_unit_interval(c.redundancy_ratio, "compute.redundancy_ratio");

  // privacy
  const json& pv = require(doc, "", "privacy");
  check_keys(pv, "privacy", {"location_weight", "channel_threshold", "threshold_angle_deg"});
  c.privacy_weight = req_num(pv, "privacy", "location_weight");
  if (!(c.privacy_weight >= 0.0)) fail("privacy.location_weight", "must be nonnegative");
  c.threshold_angle_deg =
      opt_num(pv, "privacy", "threshold_angle_deg", 0.5 * c.gamma_max_deg);
  if (!(c.threshold_angle_deg >= 0.0 && c.threshold_angle_deg <= 90.0))
    fail("privacy.threshold_angle_deg", "must lie in [0, 90]");
  // default omega: the gain seen at the reference angle, in calibrated units
  const double s_ref =
      distance_m(c.threshold_angle_deg * kDegToRad, c.earth_radius_m(), c.altitude_m());
  c.channel_threshold = opt_num(pv, "privacy", "channel_threshold",
                                channel_gain_at_m(s_ref, c.system_gain, c.ref_gain_w));
  positive(c.channel_threshold, "privacy.channel_threshold");

  // objective
  const json& ob = require(doc, "", "objective");
  check_keys(ob, "objective",
             {"energy_weight", "time_threshold_s", "failure_threshold", "privacy_threshold",
              "reward_constant"});
  c.energy_weight = req_num(ob, "objective", "energy_weight");
  if (!(c.energy_weight >= 0.0)) fail("objective.energy_weight", "must be nonnegative");
  c.time_threshold_s = req_num(ob, "objective", "time_threshold_s");
  positive(c.time_threshold_s, "objective.time_threshold_s");
  c.failure_threshold = req_num(ob, "objective", "failure_threshold");
  if (!(c.failure_threshold > 0.0 && c.failure_threshold < 1.0))
    fail("objective.failure_threshold", "must lie in (0, 1)");
  c.privacy_threshold = req_num(ob, "objective", "privacy_threshold");
  if (!(c.privacy_threshold >= 0.0)) fail("objective.privacy_threshold", "must be nonnegative");
  c.reward_constant = opt_num(ob, "objective", "reward_constant", 0.0);

  c.horizon_s = opt_num(doc, "", "horizon_s", kTwoPi / c.angular_speed_rad_s);
  positive(c.horizon_s, "horizon_s");

  if (doc.contains("rng_seed")) {
    const json& sd = doc["rng_seed"];
    if (!sd.is_number_unsigned() && !sd.is_number_integer()) fail("rng_seed", "expected an integer");
    c.rng_seed = sd.get<std::uint64_t>();
  }
  return c;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scenario: cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scenario_text(ss.str());
}

std::string save_scenario(const ScenarioConfig& c) {
  json doc;
  doc["name"] = c.name;
  doc["rng_seed"] = c.rng_seed;
  doc["horizon_s"] = c.horizon_s;
  doc["tasks"]["sizes_mb"] = c.task_sizes_mb;
  json& con = doc["constellation"];
  con["num_satellites"] = c.num_satellites;
  con["spacing_deg"] = c.spacing_deg;
  con["anchor_deg"] = c.anchor_deg;
  con["altitude_km"] = c.altitude_km;
  con["earth_radius_km"] = c.earth_radius_km;
  con["angular_speed_rad_s"] = c.angular_speed_rad_s;
  con["motion_sign"] = c.motion_sign;
  con["visibility_half_angle_deg"] = c.gamma_max_deg;
  json& ch = doc["channel"];
  ch["tx_power_w"] = c.tx_power_w;
  ch["bandwidth_hz"] = c.bandwidth_hz;
  ch["noise_power_w"] = c.noise_power_w;
  ch["ref_gain_dbm"] = c.ref_gain_dbm;
  ch["system_gain"] = c.system_gain;
  ch["calibration_snr_db"] = c.calibration_snr_db;
  json& cp = doc["compute"];
  cp["sat_speeds_mb_s"] = c.sat_speeds_mb_s;
  cp["ue_speed_mb_s"] = c.ue_speed_mb_s;
  cp["cpu_freq_ghz"] = c.cpu_freq_ghz;
  cp["hardware_factor_w_per_ghz3"] = c.hardware_factor;
  cp["isl_rate_mb_s"] = c.isl_rate_mb_s;
  cp["result_ratio"] = c.result_ratio;
  cp["redundancy_ratio"] = c.redundancy_ratio;
  json& pv = doc["privacy"];
  pv["location_weight"] = c.privacy_weight;
  pv["channel_threshold"] = c.channel_threshold;
  pv["threshold_angle_deg"] = c.threshold_angle_deg;
  json& ob = doc["objective"];
  ob["energy_weight"] = c.energy_weight;
  ob["time_threshold_s"] = c.time_threshold_s;
  ob["failure_threshold"] = c.failure_threshold;
  ob["privacy_threshold"] = c.privacy_threshold;
  ob["reward_constant"] = c.reward_constant;
  return doc.dump(2) + "\n";
}

std::uint64_t scenario_hash(const ScenarioConfig& cfg) {
  // FNV-1a over the canonical serialization (json object keys are sorted)
  const std::string s = save_scenario(cfg);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : s) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace satoff
