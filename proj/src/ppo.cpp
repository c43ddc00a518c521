#include "satoff/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "satoff/timeline.hpp"

namespace satoff {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int argmax_log_probs(const std::vector<double>& lp) {
  int best = -1;
  double best_value = kNegInf;
  for (std::size_t i = 0; i < lp.size(); ++i) {
    if (lp[i] > best_value) {
      best_value = lp[i];
      best = static_cast<int>(i);
    }
  }
  return best;
}

Decision sample_action(const HeadLogProbs& lp, Rng& rng) {
  Decision d;
  d.task = sample_from_log_probs(lp.task, rng);
  d.location = sample_from_log_probs(lp.location, rng);
  d.redundancy = sample_from_log_probs(lp.redundancy, rng);
  return d;
}

double head_entropy(const std::vector<double>& lp) {
  double h = 0.0;
  for (double v : lp) {
    if (v != kNegInf) h -= std::exp(v) * v;
  }
  return h;
}

// full-buffer diagnostics under the current parameters, no gradients
struct BufferStats {
  double surrogate = 0.0;
  double entropy = 0.0;
  double value_loss = 0.0;
};

BufferStats evaluate_buffer(const RolloutBuffer& buf, ActorCritic& net,
                            const std::vector<double>& adv, double clip_eps) {
  BufferStats stats;
  const std::size_t n = buf.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> logits = net.actor.forward(buf.obs[i]);
    const HeadLogProbs lp = head_log_probs(logits, buf.masks[i], net.heads);
    const double ratio = std::exp(joint_log_prob(lp, buf.actions[i]) - buf.log_probs[i]);
    stats.surrogate += clipped_surrogate(ratio, adv[i], clip_eps);
    stats.entropy +=
        head_entropy(lp.task) + head_entropy(lp.location) + head_entropy(lp.redundancy);
    const double v = net.critic.forward(buf.obs[i])[0];
    stats.value_loss += (v - buf.returns[i]) * (v - buf.returns[i]);
  }
  stats.surrogate /= static_cast<double>(n);
  stats.entropy /= static_cast<double>(n);
  stats.value_loss /= static_cast<double>(n);
  return stats;
}

// upstream(dLoss/dlogits) for one head; g_pg is dSurrogate/dlogp for the
// sample, inv_batch folds the minibatch mean into the per-sample pass
void head_upstream(std::vector<double>& up, int offset, const std::vector<double>& lp,
                   int chosen, double g_pg, double entropy_coef, double inv_batch) {
  const double h = head_entropy(lp);
  for (std::size_t k = 0; k < lp.size(); ++k) {
    if (lp[k] == kNegInf) {
      up[offset + k] = 0.0;
      continue;
    }
    const double p = std::exp(lp[k]);
    const double indicator = static_cast<int>(k) == chosen ? 1.0 : 0.0;
    up[offset + k] =
        (-g_pg * (indicator - p) + entropy_coef * p * (lp[k] + h)) * inv_batch;
  }
}

LogRow evaluate_policy(const ScenarioConfig& cfg, const EnvOptions& opt, ActorCritic& net,
                       int episodes, Rng& rng) {
  LogRow row;
  const auto capped = [&](double x) {
    return std::isfinite(x) ? std::min(x, opt.cost_cap) : opt.cost_cap;
  };
  for (int e = 0; e < episodes; ++e) {
    Env env(cfg, opt);
    double episode_return = 0.0;
    while (!env.done()) {
      const HeadLogProbs lp =
          head_log_probs(net.actor.forward(env.obs()), env.action_mask(), net.heads);
      episode_return += env.step(sample_action(lp, rng)).reward;
    }
    const EvaluationReport& rep = env.report();
    row.mean_return += episode_return;
    row.mean_cost += capped(rep.cost);
    row.total_time += capped(rep.total_time);
    row.energy += rep.energy;
    row.failure += rep.failure_prob;
    row.privacy += rep.privacy;
    row.feasible_fraction += rep.feasible() ? 1.0 : 0.0;
  }
  const double inv = 1.0 / episodes;
  row.mean_return *= inv;
  row.mean_cost *= inv;
  row.total_time *= inv;
  row.energy *= inv;
  row.failure *= inv;
  row.privacy *= inv;
  row.feasible_fraction *= inv;
  return row;
}

}  // namespace

double lr_at(const PpoHyper& hyper, long long timestep) {
  if (!hyper.lr_decay) return hyper.lr_init;
  if (timestep >= hyper.total_timesteps) return hyper.lr_final;
  const double frac = static_cast<double>(timestep) / hyper.total_timesteps;
  return hyper.lr_init + (hyper.lr_final - hyper.lr_init) * frac;
}

void RolloutBuffer::clear() {
  obs.clear();
  masks.clear();
  actions.clear();
  log_probs.clear();
  rewards.clear();
  values.clear();
  dones.clear();
  advantages.clear();
  returns.clear();
}

void compute_gae(RolloutBuffer& buffer, double discount, double lambda, double bootstrap) {
  const int n = static_cast<int>(buffer.size());
  buffer.advantages.assign(n, 0.0);
  buffer.returns.assign(n, 0.0);
  double adv = 0.0;
  double next_value = bootstrap;
  for (int t = n - 1; t >= 0; --t) {
    const double carry = buffer.dones[t] ? 0.0 : 1.0;
    const double delta =
        buffer.rewards[t] + discount * next_value * carry - buffer.values[t];
    adv = delta + discount * lambda * carry * adv;
    buffer.advantages[t] = adv;
    buffer.returns[t] = adv + buffer.values[t];
    next_value = buffer.values[t];
  }
}

ActorCritic make_actor_critic(int obs_dim, const std::array<int, 3>& heads, int hidden,
                              Rng& rng) {
  ActorCritic net;
  net.heads = heads;
  const int logits = heads[0] + heads[1] + heads[2];
  net.actor = Mlp::init({obs_dim, hidden, hidden, logits}, rng);
  net.actor.scale_output_layer(0.01);  // near-uniform starting policy
  net.critic = Mlp::init({obs_dim, hidden, hidden, 1}, rng);
  return net;
}

HeadLogProbs head_log_probs(const std::vector<double>& logits, const ActionMask& mask,
                            const std::array<int, 3>& heads) {
  if (static_cast<int>(logits.size()) != heads[0] + heads[1] + heads[2])
    throw std::invalid_argument("ppo: logit width does not match the heads");
  HeadLogProbs lp;
  auto slice = [&](int offset, int len) {
    return std::vector<double>(logits.begin() + offset, logits.begin() + offset + len);
  };
  lp.task = masked_log_softmax(slice(0, heads[0]), mask.task);
  lp.location = masked_log_softmax(slice(heads[0], heads[1]), mask.location);
  lp.redundancy =
      masked_log_softmax(slice(heads[0] + heads[1], heads[2]), mask.redundancy);
  return lp;
}

double joint_log_prob(const HeadLogProbs& lp, const Decision& action) {
  return lp.task[action.task] + lp.location[action.location] +
         lp.redundancy[action.redundancy];
}

double clipped_surrogate(double ratio, double adv, double clip_eps) {
  const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(ratio * adv, clipped * adv);
}

PpoDiagnostics ppo_update(RolloutBuffer& buffer, ActorCritic& net, Adam& actor_opt,
                          Adam& critic_opt, const PpoHyper& hyper, double lr, Rng& rng) {
  const std::size_t n = buffer.size();
  if (n == 0) throw std::invalid_argument("ppo: empty rollout buffer");
  if (buffer.advantages.size() != n || buffer.returns.size() != n)
    throw std::invalid_argument("ppo: advantages not computed");

  // normalize advantages across the whole round
  double mean = 0.0;
  for (double a : buffer.advantages) mean += a;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double a : buffer.advantages) var += (a - mean) * (a - mean);
  const double stddev = std::sqrt(var / static_cast<double>(n));
  std::vector<double> adv(n);
  for (std::size_t i = 0; i < n; ++i) {
    adv[i] = (buffer.advantages[i] - mean) / (stddev + 1e-8);
    if (!std::isfinite(adv[i])) {
      std::ostringstream msg;
      msg << "ppo: non-finite advantage at step " << i << " (raw "
          << buffer.advantages[i] << ", mean " << mean << ", std " << stddev << ")";
      throw std::runtime_error(msg.str());
    }
  }

  PpoDiagnostics diag;
  BufferStats stats = evaluate_buffer(buffer, net, adv, hyper.clip_eps);
  diag.epoch_surrogate.push_back(stats.surrogate);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> upstream(net.actor.output_dim());
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < n;
         start += static_cast<std::size_t>(hyper.minibatch)) {
      const std::size_t stop = std::min(n, start + hyper.minibatch);
      const double inv_batch = 1.0 / static_cast<double>(stop - start);
      net.actor.zero_grad();
      net.critic.zero_grad();
      double batch_check = 0.0;
      for (std::size_t slot = start; slot < stop; ++slot) {
        const std::size_t i = order[slot];
        const std::vector<double> logits = net.actor.forward(buffer.obs[i]);
        const HeadLogProbs lp = head_log_probs(logits, buffer.masks[i], net.heads);
        const Decision& a = buffer.actions[i];
        const double log_prob = joint_log_prob(lp, a);
        const double ratio = std::exp(log_prob - buffer.log_probs[i]);
        const double surr_plain = ratio * adv[i];
        const double surr_clip =
            std::clamp(ratio, 1.0 - hyper.clip_eps, 1.0 + hyper.clip_eps) * adv[i];
        // min() routes the gradient: the clipped branch is flat in theta
        const double g_pg = surr_plain <= surr_clip ? ratio * adv[i] : 0.0;
        head_upstream(upstream, 0, lp.task, a.task, g_pg, hyper.entropy_coef, inv_batch);
        head_upstream(upstream, net.heads[0], lp.location, a.location, g_pg,
                      hyper.entropy_coef, inv_batch);
        head_upstream(upstream, net.heads[0] + net.heads[1], lp.redundancy,
                      a.redundancy, g_pg, hyper.entropy_coef, inv_batch);
        net.actor.backward(upstream);

        const double v = net.critic.forward(buffer.obs[i])[0];
        net.critic.backward({2.0 * (v - buffer.returns[i]) * inv_batch});
        batch_check += std::min(surr_plain, surr_clip) + (v - buffer.returns[i]);
      }
      if (!std::isfinite(batch_check)) {
        std::ostringstream msg;
        msg << "ppo: non-finite loss (epoch " << epoch << ", minibatch at " << start
            << " of " << n << " samples)";
        throw std::runtime_error(msg.str());
      }
      actor_opt.step(net.actor.params(), net.actor.grads(), lr);
      critic_opt.step(net.critic.params(), net.critic.grads(), lr);
    }
    stats = evaluate_buffer(buffer, net, adv, hyper.clip_eps);
    diag.epoch_surrogate.push_back(stats.surrogate);
  }
  diag.entropy = stats.entropy;
  diag.value_loss = stats.value_loss;
  buffer.clear();
  return diag;
}

TrainResult train_ppo(const ScenarioConfig& cfg, const PpoHyper& hyper, std::uint64_t seed) {
  Rng rng(seed);
  EnvOptions opt;
  opt.penalty = hyper.penalty;
  Env env(cfg, opt);
  ActorCritic net =
      make_actor_critic(env.obs_dim(), env.head_dims(), hyper.hidden, rng);
  Adam actor_opt(net.actor.param_count());
  Adam critic_opt(net.critic.param_count());
  RolloutBuffer buffer;
  TrainResult out;
  long long steps = 0;

  const auto log_round = [&](double lr) {
    Rng eval_rng = rng.fork();
    LogRow row = evaluate_policy(cfg, opt, net, hyper.eval_episodes, eval_rng);
    row.timestep = steps;
    row.lr = lr;
    out.log.push_back(row);
  };
  log_round(lr_at(hyper, 0));

  while (steps < hyper.total_timesteps) {
    const long long target =
        std::min<long long>(hyper.horizon, hyper.total_timesteps - steps);
    for (long long k = 0; k < target; ++k) {
      const std::vector<double> obs = env.obs();
      const ActionMask mask = env.action_mask();
      const HeadLogProbs lp = head_log_probs(net.actor.forward(obs), mask, net.heads);
      const Decision action = sample_action(lp, rng);
      const double value = net.critic.forward(obs)[0];
      const EnvStep result = env.step(action);
      buffer.obs.push_back(obs);
      buffer.masks.push_back(mask);
      buffer.actions.push_back(action);
      buffer.log_probs.push_back(joint_log_prob(lp, action));
      buffer.rewards.push_back(result.reward);
      buffer.values.push_back(value);
      buffer.dones.push_back(result.done ? 1 : 0);
      if (result.done) env.reset();
      ++steps;
    }
    const double bootstrap =
        buffer.dones.back() ? 0.0 : net.critic.forward(env.obs())[0];
    compute_gae(buffer, hyper.discount, hyper.gae_lambda, bootstrap);
    const double lr = lr_at(hyper, steps);
    ppo_update(buffer, net, actor_opt, critic_opt, hyper, lr, rng);
    log_round(lr);
  }

  Env greedy_env(cfg, opt);
  out.greedy = greedy_schedule(net, greedy_env);
  out.greedy_report = evaluate_schedule(out.greedy, cfg);
  out.net = std::move(net);
  return out;
}

Schedule greedy_schedule(ActorCritic& net, Env& env) {
  env.reset();
  while (!env.done()) {
    const HeadLogProbs lp =
        head_log_probs(net.actor.forward(env.obs()), env.action_mask(), net.heads);
    Decision d;
    d.task = argmax_log_probs(lp.task);
    d.location = argmax_log_probs(lp.location);
    d.redundancy = argmax_log_probs(lp.redundancy);
    env.step(d);
  }
  return env.partial();
}

}  // namespace satoff
