#include "satoff/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace satoff {

double energy_joules(const Schedule& schedule, const EvaluationReport& rep,
                     const ScenarioConfig& cfg) {
  double local_seconds = 0.0;
  for (const Decision& d : schedule) {
    if (d.location == 0) local_seconds += cfg.task_sizes_mb[d.task] / cfg.ue_speed_mb_s;
  }
  return cfg.comp_power_w() * local_seconds + cfg.tx_power_w * rep.upload_seconds;
}

double failure_probability(const Schedule& schedule, const EvaluationReport& rep,
                           const ScenarioConfig& cfg) {
  // ln r_success accumulates bits * ln(1 - ber) per offloaded task; the local
  // branch is excluded so an all-local run never counts as a radio failure
  double log_success = 0.0;
  for (const Decision& d : schedule) {
    if (d.location == 0) continue;
    const double bits =
        cfg.task_size_bits(d.task) * (1.0 + cfg.redundancy_ratio * d.redundancy);
    log_success += bits * std::log1p(-rep.tasks[d.task].ber);
  }
  const double fail = 1.0 - std::exp(log_success);
  return std::clamp(fail, 0.0, 1.0);
}

PrivacyRecord privacy_record(const Schedule& schedule, const EvaluationReport& rep,
                             const ScenarioConfig& cfg) {
  PrivacyRecord rec;
  double sum = 0.0;
  for (const Decision& d : schedule) {
    int pu, pl;
    if (d.location == 0) {
      pu = 1;
      pl = 1;
    } else {
      const double g = rep.tasks[d.task].gain;
      pu = (d.redundancy == 1 && g >= cfg.channel_threshold) ? 1 : 0;
      pl = (g < cfg.channel_threshold) ? 1 : 0;
    }
    rec.p_u.push_back(pu);
    rec.p_l.push_back(pl);
    sum += pu + cfg.privacy_weight * pl;
  }
  rec.average = schedule.empty() ? 0.0 : sum / static_cast<double>(schedule.size());
  return rec;
}

void finalize_metrics(const Schedule& schedule, EvaluationReport& rep,
                      const ScenarioConfig& cfg) {
  rep.energy = energy_joules(schedule, rep, cfg);
  rep.failure_prob = failure_probability(schedule, rep, cfg);
  rep.privacy = privacy_record(schedule, rep, cfg).average;
  if (rep.transmission_ok) {
    rep.cost = rep.total_time + cfg.energy_weight * rep.energy;
    rep.feasible_time = rep.total_time < cfg.time_threshold_s;
    rep.feasible_reliability = rep.failure_prob < cfg.failure_threshold;
    rep.feasible_privacy = rep.privacy >= cfg.privacy_threshold;
  } else {
    rep.cost = kInf;
    rep.feasible_time = false;
    rep.feasible_reliability = false;
    rep.feasible_privacy = false;
  }
}

}  // namespace satoff
