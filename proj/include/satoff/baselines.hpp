#pragma once

#include <cstdint>

#include "satoff/scenario.hpp"
#include "satoff/timeline.hpp"
#include "satoff/types.hpp"

namespace satoff {

struct PolicyResult {
  Schedule schedule;
  EvaluationReport report;
  bool found_feasible = false;  // the returned schedule meets every constraint
};

// Best of `samples` uniformly random schedules (shuffled order, uniform
// location in [0, M], fair-coin redundancy) drawn from one seeded stream.
// Feasible schedules are preferred over infeasible ones, then lower cost wins.
// Growing `samples` under a fixed seed extends the same pool, so the winner
// never gets worse.
PolicyResult random_policy(const ScenarioConfig& cfg, int samples, std::uint64_t seed);

// Deterministic round-robin: tasks in id order spread over the satellites
// visible at t = 0 taken in counterclockwise index order, no redundancy.
// Falls back to an all-local schedule when no satellite is visible.
PolicyResult uniform_policy(const ScenarioConfig& cfg);

}  // namespace satoff
