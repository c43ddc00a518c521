#pragma once

#include <limits>
#include <vector>

namespace satoff {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// One ordered offloading decision. location: 0 = local, 1..M = satellite
// (location - 1 is the satellite index).
struct Decision {
  int task = 0;
  int location = 0;
  int redundancy = 0;

  friend bool operator==(const Decision&, const Decision&) = default;
};

// Complete ordered assignment: every task id exactly once, in transmission order.
using Schedule = std::vector<Decision>;

// Per-task event timestamps (seconds from episode start).
// Local tasks: upload_start == upload_end == comp_start (slot start),
// migrate_end == download_end == comp_end, hops == 0, landing == 0.
struct TaskTimeline {
  int task = 0;
  int location = 0;
  int redundancy = 0;
  double upload_start = 0.0;
  double upload_end = 0.0;
  double comp_start = 0.0;
  double comp_end = 0.0;
  double migrate_end = 0.0;
  double download_end = 0.0;
  int hops = 0;     // result migrations over ISL
  int landing = 0;  // satellite location after migration (1..M), 0 for local
  // link state frozen at upload start (0 for local tasks)
  double upload_rate_bps = 0.0;
  double ber = 0.0;
  double gain = 0.0;
};

struct EvaluationReport {
  double total_time = 0.0;    // seconds
  double energy = 0.0;        // joules
  double failure_prob = 0.0;  // probability
  double privacy = 0.0;       // averaged P_total
  double cost = 0.0;          // total_time + mu * energy
  bool feasible_time = false;
  bool feasible_reliability = false;
  bool feasible_privacy = false;
  // false when some upload could never start within the horizon
  bool transmission_ok = true;
  double offload_end = 0.0;     // max download_end over offloaded tasks
  double local_end = 0.0;       // end of the local computation chain
  double radio_end = 0.0;       // when the last upload leaves the antenna
  double upload_seconds = 0.0;  // total transmit time (drives radio energy)
  std::vector<TaskTimeline> tasks;  // indexed by task id

  bool feasible() const {
    return transmission_ok && feasible_time && feasible_reliability && feasible_privacy;
  }
};

}  // namespace satoff
