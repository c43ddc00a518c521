#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "satoff/env.hpp"
#include "satoff/mlp.hpp"
#include "satoff/rng.hpp"
#include "satoff/scenario.hpp"
#include "satoff/types.hpp"

namespace satoff {

struct PpoHyper {
  double clip_eps = 0.2;
  double discount = 0.99;
  double gae_lambda = 0.95;
  int horizon = 2048;    // steps collected per update round
  int epochs = 10;       // optimisation passes per round
  int minibatch = 64;
  double lr_init = 1e-3;
  double lr_final = 5.76e-7;
  long long total_timesteps = 1'000'000;
  double penalty = 100.0;  // terminal charge per violated constraint
  double entropy_coef = 0.01;
  bool lr_decay = true;  // false holds lr_init for the whole run
  int hidden = 64;       // width of both hidden layers
  int eval_episodes = 4;
};

// Linear interpolation from lr_init to lr_final; clamps to lr_final verbatim
// at and beyond the last timestep so the logged endpoint is exact.
double lr_at(const PpoHyper& hyper, long long timestep);

struct RolloutBuffer {
  std::vector<std::vector<double>> obs;
  std::vector<ActionMask> masks;
  std::vector<Decision> actions;
  std::vector<double> log_probs;  // joint, under the collecting policy
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<char> dones;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return rewards.size(); }
  void clear();
};

// Backward-recursive generalized advantage estimation; `bootstrap` is the
// critic's value for the state after the last stored step (zero when that
// step ended its episode). Fills advantages and returns = advantages + values.
void compute_gae(RolloutBuffer& buffer, double discount, double lambda, double bootstrap);

// Actor trunk emits all three heads' logits back to back:
// [task n_max][location m_max+1][redundancy 2].
struct ActorCritic {
  Mlp actor;
  Mlp critic;
  std::array<int, 3> heads{};
};

ActorCritic make_actor_critic(int obs_dim, const std::array<int, 3>& heads, int hidden,
                              Rng& rng);

struct HeadLogProbs {
  std::vector<double> task, location, redundancy;
};

HeadLogProbs head_log_probs(const std::vector<double>& logits, const ActionMask& mask,
                            const std::array<int, 3>& heads);
double joint_log_prob(const HeadLogProbs& lp, const Decision& action);

// min(ratio * adv, clamp(ratio, 1 - eps, 1 + eps) * adv)
double clipped_surrogate(double ratio, double adv, double clip_eps);

struct PpoDiagnostics {
  // full-buffer objective before the first epoch and after every epoch
  std::vector<double> epoch_surrogate;
  double value_loss = 0.0;
  double entropy = 0.0;
};

// One PPO round: normalizes advantages over the buffer, runs `epochs`
// shuffled-minibatch passes of clipped-surrogate ascent (+ entropy bonus) on
// the actor and squared-error descent on the critic, then clears the buffer.
// Throws std::runtime_error with a diagnostic dump on non-finite losses.
PpoDiagnostics ppo_update(RolloutBuffer& buffer, ActorCritic& net, Adam& actor_opt,
                          Adam& critic_opt, const PpoHyper& hyper, double lr, Rng& rng);

struct LogRow {
  long long timestep = 0;
  double mean_return = 0.0;
  double mean_cost = 0.0;
  double total_time = 0.0;
  double energy = 0.0;
  double failure = 0.0;
  double privacy = 0.0;
  double feasible_fraction = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  ActorCritic net;
  std::vector<LogRow> log;
  Schedule greedy;
  EvaluationReport greedy_report;
};

// Alternates horizon-length collection with ppo_update until the timestep
// budget is spent (the last round truncates to land exactly on it). Each log
// row reports stochastic evaluation episodes under the current policy, with
// infinite metrics capped at the environment's cost cap; row zero profiles
// the untrained policy.
TrainResult train_ppo(const ScenarioConfig& cfg, const PpoHyper& hyper, std::uint64_t seed);

// Argmax-per-head rollout of the deterministic policy; resets the env first.
Schedule greedy_schedule(ActorCritic& net, Env& env);

}  // namespace satoff
