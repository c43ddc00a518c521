#pragma once

#include "satoff/scenario.hpp"
#include "satoff/types.hpp"

namespace satoff {

// Throws std::invalid_argument unless the schedule covers every task exactly
// once with locations in [0, M] and binary redundancy flags.
void validate_schedule(const Schedule& schedule, const ScenarioConfig& cfg);

// Same checks without requiring completeness: a prefix may leave tasks
// undecided but must not repeat one.
void validate_partial(const Schedule& schedule, const ScenarioConfig& cfg);

// Deterministic evaluation of a complete schedule: sequential uploads with
// the rate frozen at each upload's start, per-satellite single-core FCFS
// compute, local compute back-to-back after the last upload, result migration
// over ISL hops when the computing satellite is invisible, and backhaul at the
// landing satellite. Fills every metric and feasibility flag.
EvaluationReport evaluate_schedule(const Schedule& schedule, const ScenarioConfig& cfg);

// Evaluates a schedule prefix as its own mini-problem; undecided tasks keep
// default timelines and the feasibility flags only mean something once the
// prefix is complete. The incremental environment reward is built on this.
EvaluationReport evaluate_partial(const Schedule& schedule, const ScenarioConfig& cfg);

}  // namespace satoff
