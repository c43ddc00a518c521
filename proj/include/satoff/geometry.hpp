#pragma once

#include <cmath>

#include "satoff/scenario.hpp"
#include "satoff/units.hpp"

namespace satoff {

// complementary error function, rational approximation, |abs err| < 1.2e-7
double erfc_approx(double x);

// wrap into [0, 2*pi)
inline double wrap_angle(double g) {
  g = std::fmod(g, kTwoPi);
  if (g < 0.0) g += kTwoPi;
  return g;
}

// UE-satellite slant range by the cosine law; gamma is the geocentric angle.
inline double distance_m(double gamma, double earth_radius_m, double altitude_m) {
  const double r = earth_radius_m;
  const double q = earth_radius_m + altitude_m;
  return std::sqrt(r * r + q * q - 2.0 * r * q * std::cos(gamma));
}

inline bool is_visible_angle(double gamma, double gamma_max_rad) {
  const double g = wrap_angle(gamma);
  return g <= gamma_max_rad || kTwoPi - g <= gamma_max_rad;
}

// free-space gain at slant range s (meters)
inline double channel_gain_at_m(double s_m, double system_gain, double ref_gain_w) {
  return system_gain * ref_gain_w / (s_m * s_m);
}

inline double snr_from_gain(double h, double tx_power_w, double noise_power_w) {
  return tx_power_w * h / noise_power_w;
}

// Shannon rate in bits/s
inline double data_rate_bps(double snr, double bandwidth_hz) {
  return bandwidth_hz * std::log2(1.0 + snr);
}

// BPSK bit error rate
inline double ber_from_snr(double snr) {
  return 0.5 * erfc_approx(std::sqrt(snr));
}

// config-level wrappers ------------------------------------------------------

inline double distance_m(const ScenarioConfig& cfg, double gamma) {
  return distance_m(gamma, cfg.earth_radius_m(), cfg.altitude_m());
}

inline bool is_visible(const ScenarioConfig& cfg, double gamma) {
  return is_visible_angle(gamma, cfg.gamma_max_rad());
}

inline double channel_gain(const ScenarioConfig& cfg, double s_m) {
  return channel_gain_at_m(s_m, cfg.system_gain, cfg.ref_gain_w);
}

inline double snr(const ScenarioConfig& cfg, double h) {
  return snr_from_gain(h, cfg.tx_power_w, cfg.noise_power_w);
}

inline double data_rate(const ScenarioConfig& cfg, double snr_lin) {
  return data_rate_bps(snr_lin, cfg.bandwidth_hz);
}

// geocentric angle of satellite j at time t
inline double sat_angle(const ScenarioConfig& cfg, int j, double t) {
  return wrap_angle(cfg.anchor_rad() + j * cfg.spacing_rad() +
                    cfg.motion_sign * cfg.angular_speed_rad_s * t);
}

// link state at one instant, bundled because the timeline freezes all three
// at a transfer's start
struct LinkState {
  double gain = 0.0;
  double rate_bps = 0.0;
  double ber = 0.0;
};

inline LinkState link_state(const ScenarioConfig& cfg, double gamma) {
  LinkState ls;
  const double s = distance_m(cfg, gamma);
  ls.gain = channel_gain(cfg, s);
  const double snr_lin = snr(cfg, ls.gain);
  ls.rate_bps = data_rate(cfg, snr_lin);
  ls.ber = ber_from_snr(snr_lin);
  return ls;
}

// Smallest dt >= 0 after which a satellite currently at wrapped angle g enters
// the visible arc, given the motion direction. Assumes V > 0.
inline double wait_until_visible(double g, double gamma_max_rad, double angular_speed,
                                 int motion_sign) {
  if (is_visible_angle(g, gamma_max_rad)) return 0.0;
  if (motion_sign < 0) return (g - gamma_max_rad) / angular_speed;
  return (kTwoPi - gamma_max_rad - g) / angular_speed;
}

}  // namespace satoff
