#pragma once

#include <cstdint>
#include <vector>

#include "satoff/env.hpp"
#include "satoff/mlp.hpp"
#include "satoff/ppo.hpp"
#include "satoff/rng.hpp"
#include "satoff/scenario.hpp"
#include "satoff/types.hpp"

namespace satoff {

struct DqnHyper {
  double discount = 0.99;
  double lr = 1e-3;
  double eps_start = 1.0;  // epsilon-greedy exploration schedule
  double eps_end = 0.05;
  long long eps_decay_steps = 20'000;
  int capacity = 50'000;  // replay ring buffer
  int batch = 64;
  long long learn_start = 500;  // steps before the first gradient update
  int target_sync = 500;        // steps between target-network refreshes
  long long total_timesteps = 50'000;
  double penalty = 100.0;
  int hidden = 64;
  int log_every = 2048;
};

// The three-part action collapses into one index so a single Q head covers
// the whole space: ((task * (m_max + 1)) + location) * 2 + redundancy.
int flatten_action(const Decision& action, int m_max);
Decision unflatten_action(int index, int m_max);

// Validity of every flat action in the current state, from the env mask.
std::vector<char> flat_action_mask(const Env& env);

// argmax of q over the unmasked flat actions (lowest index wins ties)
int dqn_greedy_action(Mlp& q, const std::vector<double>& obs,
                      const std::vector<char>& mask);

struct DqnResult {
  Mlp q;
  std::vector<LogRow> log;  // same schema as the PPO trainer
  Schedule greedy;
  EvaluationReport greedy_report;
};

// Classic DQN: replay buffer, target network, epsilon-greedy over the masked
// flat action space, squared Bellman error on the taken action.
DqnResult dqn_train(const ScenarioConfig& cfg, const DqnHyper& hyper, std::uint64_t seed);

}  // namespace satoff
