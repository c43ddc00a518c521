#pragma once

#include <vector>

#include "satoff/scenario.hpp"
#include "satoff/types.hpp"

namespace satoff {

// Per-decision privacy indicators, in schedule order.
struct PrivacyRecord {
  std::vector<int> p_u;  // usage-pattern privacy indicator
  std::vector<int> p_l;  // location privacy indicator
  double average = 0.0;  // mean of p_u(n) + weight * p_l(n)
};

// Radio energy for every upload second plus CPU energy for local tasks.
double energy_joules(const Schedule& schedule, const EvaluationReport& rep,
                     const ScenarioConfig& cfg);

// Failure probability of the offloading transmissions, evaluated in the log
// domain; tasks computed locally contribute nothing.
double failure_probability(const Schedule& schedule, const EvaluationReport& rep,
                           const ScenarioConfig& cfg);

PrivacyRecord privacy_record(const Schedule& schedule, const EvaluationReport& rep,
                             const ScenarioConfig& cfg);

// Fills energy, failure_prob, privacy, cost, and the feasibility flags.
void finalize_metrics(const Schedule& schedule, EvaluationReport& rep,
                      const ScenarioConfig& cfg);

}  // namespace satoff
