#include "satoff/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "satoff/timeline.hpp"

namespace satoff {
namespace {

struct Transition {
  std::vector<double> obs;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;
  std::vector<char> next_mask;
  bool done = false;
};

double epsilon_at(const DqnHyper& hyper, long long step) {
  if (step >= hyper.eps_decay_steps) return hyper.eps_end;
  const double frac = static_cast<double>(step) / hyper.eps_decay_steps;
  return hyper.eps_start + (hyper.eps_end - hyper.eps_start) * frac;
}

Decision random_valid_action(const Env& env, Rng& rng) {
  const ActionMask mask = env.action_mask();
  std::vector<int> open;
  for (std::size_t i = 0; i < mask.task.size(); ++i) {
    if (mask.task[i]) open.push_back(static_cast<int>(i));
  }
  Decision d;
  d.task = open[rng.below(open.size())];
  d.location = static_cast<int>(rng.below(env.config().num_satellites + 1));
  d.redundancy = rng.coin() ? 1 : 0;
  return d;
}

double max_masked_q(const std::vector<double>& q, const std::vector<char>& mask) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (mask[i] && q[i] > best) best = q[i];
  }
  return best;
}

LogRow greedy_eval(const ScenarioConfig& cfg, const EnvOptions& opt, Mlp& q) {
  Env env(cfg, opt);
  double episode_return = 0.0;
  while (!env.done()) {
    const int a = dqn_greedy_action(q, env.obs(), flat_action_mask(env));
    episode_return += env.step(unflatten_action(a, env.m_max())).reward;
  }
  const auto capped = [&](double x) {
    return std::isfinite(x) ? std::min(x, opt.cost_cap) : opt.cost_cap;
  };
  const EvaluationReport& rep = env.report();
  LogRow row;
  row.mean_return = episode_return;
  row.mean_cost = capped(rep.cost);
  row.total_time = capped(rep.total_time);
  row.energy = rep.energy;
  row.failure = rep.failure_prob;
  row.privacy = rep.privacy;
  row.feasible_fraction = rep.feasible() ? 1.0 : 0.0;
  return row;
}

}  // namespace

int flatten_action(const Decision& action, int m_max) {
  return (action.task * (m_max + 1) + action.location) * 2 + action.redundancy;
}

Decision unflatten_action(int index, int m_max) {
  Decision d;
  d.redundancy = index % 2;
  const int rest = index / 2;
  d.location = rest % (m_max + 1);
  d.task = rest / (m_max + 1);
  return d;
}

std::vector<char> flat_action_mask(const Env& env) {
  const ActionMask mask = env.action_mask();
  std::vector<char> flat(env.flat_action_dim(), 0);
  for (int t = 0; t < env.n_max(); ++t) {
    if (!mask.task[t]) continue;
    for (int l = 0; l <= env.m_max(); ++l) {
      if (!mask.location[l]) continue;
      for (int r = 0; r < 2; ++r) flat[flatten_action({t, l, r}, env.m_max())] = 1;
    }
  }
  return flat;
}

int dqn_greedy_action(Mlp& q, const std::vector<double>& obs,
                      const std::vector<char>& mask) {
  const std::vector<double> values = q.forward(obs);
  int best = -1;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mask[i] && values[i] > best_value) {
      best_value = values[i];
      best = static_cast<int>(i);
    }
  }
  return best;
}

DqnResult dqn_train(const ScenarioConfig& cfg, const DqnHyper& hyper, std::uint64_t seed) {
  Rng rng(seed);
  EnvOptions opt;
  opt.penalty = hyper.penalty;
  Env env(cfg, opt);
  Mlp q = Mlp::init({env.obs_dim(), hyper.hidden, hyper.hidden, env.flat_action_dim()},
                    rng);
  Mlp target = q;
  Adam optimizer(q.param_count());

  std::vector<Transition> replay;
  replay.reserve(std::min<long long>(hyper.capacity, hyper.total_timesteps));
  std::size_t write_slot = 0;

  DqnResult out;
  long long steps = 0;
  const auto log_round = [&]() {
    LogRow row = greedy_eval(cfg, opt, q);
    row.timestep = steps;
    row.lr = hyper.lr;
    out.log.push_back(row);
  };
  log_round();

  long long next_log = hyper.log_every;
  while (steps < hyper.total_timesteps) {
    const std::vector<double> obs = env.obs();
    Decision decision;
    if (rng.uniform() < epsilon_at(hyper, steps)) {
      decision = random_valid_action(env, rng);
    } else {
      decision = unflatten_action(dqn_greedy_action(q, obs, flat_action_mask(env)),
                                  env.m_max());
    }
    const EnvStep result = env.step(decision);
    Transition tr;
    tr.obs = obs;
    tr.action = flatten_action(decision, env.m_max());
    tr.reward = result.reward;
    tr.done = result.done;
    if (result.done) env.reset();
    tr.next_obs = env.obs();
    tr.next_mask = flat_action_mask(env);
    if (static_cast<int>(replay.size()) < hyper.capacity) {
      replay.push_back(std::move(tr));
    } else {
      replay[write_slot] = std::move(tr);
      write_slot = (write_slot + 1) % replay.size();
    }
    ++steps;

    if (steps >= hyper.learn_start && static_cast<int>(replay.size()) >= hyper.batch) {
      q.zero_grad();
      const double inv_batch = 1.0 / hyper.batch;
      std::vector<double> upstream(env.flat_action_dim(), 0.0);
      for (int b = 0; b < hyper.batch; ++b) {
        const Transition& t = replay[rng.below(replay.size())];
        double y = t.reward;
        if (!t.done) {
          y += hyper.discount * max_masked_q(target.forward(t.next_obs), t.next_mask);
        }
        const std::vector<double> values = q.forward(t.obs);
        std::fill(upstream.begin(), upstream.end(), 0.0);
        upstream[t.action] = 2.0 * (values[t.action] - y) * inv_batch;
        q.backward(upstream);
      }
      optimizer.step(q.params(), q.grads(), hyper.lr);
    }
    if (steps % hyper.target_sync == 0) target = q;

    if (steps >= next_log || steps == hyper.total_timesteps) {
      log_round();
      next_log += hyper.log_every;
    }
  }

  Env greedy_env(cfg, opt);
  while (!greedy_env.done()) {
    const int a = dqn_greedy_action(q, greedy_env.obs(), flat_action_mask(greedy_env));
    greedy_env.step(unflatten_action(a, greedy_env.m_max()));
  }
  out.greedy = greedy_env.partial();
  out.greedy_report = evaluate_schedule(out.greedy, cfg);
  out.q = std::move(q);
  return out;
}

}  // namespace satoff
