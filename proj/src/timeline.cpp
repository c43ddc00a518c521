#include "satoff/timeline.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "satoff/geometry.hpp"
#include "satoff/metrics.hpp"

namespace satoff {
namespace {

void mark_unreachable(TaskTimeline& tl) {
  tl.upload_start = tl.upload_end = kInf;
  tl.comp_start = tl.comp_end = kInf;
  tl.migrate_end = tl.download_end = kInf;
  tl.hops = 0;
  tl.landing = tl.location;
  tl.upload_rate_bps = 0.0;
  tl.ber = 0.0;
  tl.gain = 0.0;
}

}  // namespace

void validate_schedule(const Schedule& schedule, const ScenarioConfig& cfg) {
  const int n = cfg.num_tasks();
  if (static_cast<int>(schedule.size()) != n)
    throw std::invalid_argument("schedule: expected one decision per task");
  validate_partial(schedule, cfg);
}

void validate_partial(const Schedule& schedule, const ScenarioConfig& cfg) {
  const int n = cfg.num_tasks();
  if (static_cast<int>(schedule.size()) > n)
    throw std::invalid_argument("schedule: more decisions than tasks");
  std::vector<char> seen(n, 0);
  for (const Decision& d : schedule) {
    if (d.task < 0 || d.task >= n)
      throw std::invalid_argument("schedule: task id out of range");
    if (seen[d.task]) throw std::invalid_argument("schedule: task assigned twice");
    seen[d.task] = 1;
    if (d.location < 0 || d.location > cfg.num_satellites)
      throw std::invalid_argument("schedule: satellite location out of range");
    if (d.redundancy != 0 && d.redundancy != 1)
      throw std::invalid_argument("schedule: redundancy flag must be 0 or 1");
  }
}

EvaluationReport evaluate_partial(const Schedule& schedule, const ScenarioConfig& cfg) {
  validate_partial(schedule, cfg);
  const int n = cfg.num_tasks();
  const int m = cfg.num_satellites;
  const double gamma_max = cfg.gamma_max_rad();
  const double v = cfg.angular_speed_rad_s;

  EvaluationReport rep;
  rep.tasks.resize(n);
  std::vector<double> server_free(m, 0.0);
  std::vector<int> local_tasks;
  double t_up = 0.0;  // upload front: the link carries one transfer at a time

  for (const Decision& d : schedule) {
    TaskTimeline& tl = rep.tasks[d.task];
    tl.task = d.task;
    tl.location = d.location;
    tl.redundancy = d.redundancy;
    if (d.location == 0) {
      local_tasks.push_back(d.task);
      continue;
    }
    if (!rep.transmission_ok) {  // queued behind an upload that never starts
      mark_unreachable(tl);
      continue;
    }
    const int j = d.location - 1;

    // wait for the target to rise above the visibility boundary
    const double wait =
        wait_until_visible(sat_angle(cfg, j, t_up), gamma_max, v, cfg.motion_sign);
    const double start = t_up + wait;
    if (start > cfg.horizon_s) {
      rep.transmission_ok = false;
      mark_unreachable(tl);
      continue;
    }

    // rate, gain, and BER frozen at the upload-start instant
    const LinkState ls = link_state(cfg, sat_angle(cfg, j, start));
    const double bits =
        cfg.task_size_bits(d.task) * (1.0 + cfg.redundancy_ratio * d.redundancy);
    const double upload_dur = bits / ls.rate_bps;
    tl.upload_start = start;
    tl.upload_end = start + upload_dur;
    tl.upload_rate_bps = ls.rate_bps;
    tl.ber = ls.ber;
    tl.gain = ls.gain;
    rep.upload_seconds += upload_dur;
    t_up = tl.upload_end;

    // single-core FCFS: arrival order equals schedule order here because
    // uploads are sequential
    tl.comp_start = std::max(server_free[j], tl.upload_end);
    tl.comp_end = tl.comp_start + cfg.task_sizes_mb[d.task] / cfg.sat_speed_mb_s(j);
    server_free[j] = tl.comp_end;

    // migrate the result toward the visible arc if the server drifted out
    int hops = 0;
    int landing = j;
    const double g_end = sat_angle(cfg, j, tl.comp_end);
    if (!is_visible_angle(g_end, gamma_max)) {
      const int dir = g_end < kPi ? -1 : 1;  // counterclockwise below 180 degrees
      for (int k = 1; k < m; ++k) {
        const int cand = ((j + dir * k) % m + m) % m;
        if (is_visible_angle(sat_angle(cfg, cand, tl.comp_end), gamma_max)) {
          hops = k;
          landing = cand;
          break;
        }
      }
      // no satellite visible at all: result stays put, backhaul runs anyway
    }
    tl.hops = hops;
    tl.landing = landing + 1;
    tl.migrate_end =
        tl.comp_end + hops * (cfg.result_ratio * cfg.task_sizes_mb[d.task]) / cfg.isl_rate_mb_s;

    // backhaul at the landing satellite, rate taken at migrate_end
    const LinkState back = link_state(cfg, sat_angle(cfg, landing, tl.migrate_end));
    const double back_bits = cfg.result_ratio * cfg.task_size_bits(d.task);
    tl.download_end = tl.migrate_end + back_bits / back.rate_bps;
    rep.offload_end = std::max(rep.offload_end, tl.download_end);
  }

  if (!rep.transmission_ok) rep.offload_end = kInf;
  rep.radio_end = rep.transmission_ok ? t_up : kInf;

  // local chain starts once the radio falls silent
  double cursor = rep.transmission_ok ? t_up : kInf;
  for (int t : local_tasks) {
    TaskTimeline& tl = rep.tasks[t];
    tl.upload_start = tl.upload_end = tl.comp_start = cursor;
    tl.comp_end = cursor + cfg.task_sizes_mb[t] / cfg.ue_speed_mb_s;
    tl.migrate_end = tl.download_end = tl.comp_end;
    cursor = tl.comp_end;
  }
  rep.local_end = cursor;
  rep.total_time = std::max(rep.offload_end, rep.local_end);

  finalize_metrics(schedule, rep, cfg);
  return rep;
}

EvaluationReport evaluate_schedule(const Schedule& schedule, const ScenarioConfig& cfg) {
  validate_schedule(schedule, cfg);
  return evaluate_partial(schedule, cfg);
}

}  // namespace satoff
