#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "satoff/scenario.hpp"
#include "satoff/timeline.hpp"
#include "satoff/types.hpp"

namespace satoff {

struct EnvOptions {
  int n_max = 0;             // observation/action padding; 0 means num_tasks
  int m_max = 0;             // satellite padding; 0 means num_satellites
  double penalty = 100.0;    // terminal charge per violated constraint
  double cost_cap = 1e12;    // finite stand-in for an infinite partial cost
};

struct EnvStep {
  double reward = 0.0;
  bool done = false;
};

struct ActionMask {
  std::vector<char> task;        // n_max entries: unassigned real tasks only
  std::vector<char> location;    // m_max+1 entries: 0 (local) and real satellites
  std::vector<char> redundancy;  // always both
};

struct TraceStep {
  std::uint64_t state_hash = 0;  // FNV-1a over the observation bytes
  Decision action;
  double reward = 0.0;
};

// Sequential decision environment over the simulator. One episode builds one
// schedule: each step commits (task, location, redundancy), the reward is the
// negated marginal cost of the growing prefix (plus the reward constant), and
// the final step charges a penalty per violated constraint. Dynamics are
// deterministic; stochasticity lives entirely in the policy.
class Env {
 public:
  explicit Env(const ScenarioConfig& cfg, EnvOptions opt = {});

  int n_max() const { return n_max_; }
  int m_max() const { return m_max_; }
  // [task_status, clock, (sin, cos, backlog) per satellite slot, step fraction]
  int obs_dim() const { return n_max_ + 1 + 3 * m_max_ + 1; }
  std::array<int, 3> head_dims() const { return {n_max_, m_max_ + 1, 2}; }
  int flat_action_dim() const { return n_max_ * (m_max_ + 1) * 2; }

  const std::vector<double>& reset(std::uint64_t seed = 0);
  EnvStep step(const Decision& action);  // throws std::logic_error when masked

  const std::vector<double>& obs() const { return obs_; }
  ActionMask action_mask() const;
  bool action_allowed(const Decision& action) const;
  bool done() const { return static_cast<int>(partial_.size()) == num_tasks_; }
  int steps_taken() const { return static_cast<int>(partial_.size()); }
  const Schedule& partial() const { return partial_; }
  const EvaluationReport& report() const { return report_; }
  const ScenarioConfig& config() const { return cfg_; }
  const EnvOptions& options() const { return opt_; }

  const std::vector<TraceStep>& trace() const { return trace_; }
  void write_trace(std::ostream& out) const;  // one JSON object per line

 private:
  ScenarioConfig cfg_;
  EnvOptions opt_;
  int num_tasks_ = 0;
  int n_max_ = 0;
  int m_max_ = 0;
  Schedule partial_;
  EvaluationReport report_;
  double prev_cost_ = 0.0;
  std::vector<double> obs_;
  std::vector<TraceStep> trace_;

  double capped_cost() const;
  void rebuild_obs();
};

std::uint64_t hash_observation(const std::vector<double>& obs);

}  // namespace satoff
