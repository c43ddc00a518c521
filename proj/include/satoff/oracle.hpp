#pragma once

#include <cstdint>

#include "satoff/scenario.hpp"
#include "satoff/timeline.hpp"
#include "satoff/types.hpp"

namespace satoff {

struct OracleResult {
  bool has_feasible = false;
  Schedule best_feasible;  // empty when no feasible schedule exists
  EvaluationReport best_feasible_report;
  Schedule best_any;  // unconstrained cost minimiser, for diagnostics
  EvaluationReport best_any_report;
  std::uint64_t states_examined = 0;
};

// Closed-form size of the search space: ((M+1)*2)^N * N!, as a double so
// hopeless instances can still be reported without overflow.
double oracle_state_count(const ScenarioConfig& cfg);

// Evaluates every ordered decision sequence. Candidates are visited in
// lexicographic order (permutations ascending, then location, then
// redundancy), and ties keep the first winner, so the result is the
// lexicographically smallest optimum. Throws std::runtime_error naming the
// state count when it exceeds `cap`.
OracleResult brute_force_oracle(const ScenarioConfig& cfg, std::uint64_t cap = 10'000'000);

}  // namespace satoff
