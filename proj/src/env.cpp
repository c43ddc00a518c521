#include "satoff/env.hpp"

#include <cmath>
#include <cstring>
#include <ostream>
#include <stdexcept>

#include "satoff/geometry.hpp"

namespace satoff {

Env::Env(const ScenarioConfig& cfg, EnvOptions opt)
    : cfg_(cfg), opt_(opt), num_tasks_(cfg.num_tasks()) {
  n_max_ = opt_.n_max > 0 ? opt_.n_max : num_tasks_;
  m_max_ = opt_.m_max > 0 ? opt_.m_max : cfg_.num_satellites;
  if (n_max_ < num_tasks_)
    throw std::invalid_argument("env: n_max smaller than the task count");
  if (m_max_ < cfg_.num_satellites)
    throw std::invalid_argument("env: m_max smaller than the satellite count");
  reset();
}

const std::vector<double>& Env::reset(std::uint64_t) {
  // dynamics are deterministic; the seed is accepted for interface stability
  partial_.clear();
  report_ = EvaluationReport{};
  prev_cost_ = 0.0;
  trace_.clear();
  rebuild_obs();
  return obs_;
}

double Env::capped_cost() const {
  const double c = report_.cost;
  return std::isfinite(c) ? std::min(c, opt_.cost_cap) : opt_.cost_cap;
}

bool Env::action_allowed(const Decision& action) const {
  if (done()) return false;
  if (action.task < 0 || action.task >= num_tasks_) return false;
  for (const Decision& d : partial_) {
    if (d.task == action.task) return false;
  }
  if (action.location < 0 || action.location > cfg_.num_satellites) return false;
  return action.redundancy == 0 || action.redundancy == 1;
}

ActionMask Env::action_mask() const {
  ActionMask mask;
  mask.task.assign(n_max_, 0);
  for (int i = 0; i < num_tasks_; ++i) mask.task[i] = 1;
  for (const Decision& d : partial_) mask.task[d.task] = 0;
  mask.location.assign(m_max_ + 1, 0);
  for (int l = 0; l <= cfg_.num_satellites; ++l) mask.location[l] = 1;
  mask.redundancy.assign(2, 1);
  return mask;
}

EnvStep Env::step(const Decision& action) {
  if (!action_allowed(action))
    throw std::logic_error("env: action violates the mask contract");
  const std::uint64_t pre_hash = hash_observation(obs_);

  partial_.push_back(action);
  report_ = evaluate_partial(partial_, cfg_);
  const double cost = capped_cost();

  EnvStep out;
  out.reward = cfg_.reward_constant - (cost - prev_cost_);
  prev_cost_ = cost;
  out.done = done();
  if (out.done) {
    const int violations = (report_.feasible_time ? 0 : 1) +
                           (report_.feasible_reliability ? 0 : 1) +
                           (report_.feasible_privacy ? 0 : 1);
    out.reward -= opt_.penalty * violations;
  }
  rebuild_obs();
  trace_.push_back({pre_hash, action, out.reward});
  return out;
}

void Env::rebuild_obs() {
  obs_.assign(obs_dim(), 0.0);
  for (int i = 0; i < num_tasks_; ++i) obs_[i] = -1.0;
  for (const Decision& d : partial_) {
    // committed tasks land in (0, 1]; padding stays 0
    obs_[d.task] =
        (d.location * 2 + d.redundancy + 1) / (2.0 * (m_max_ + 1));
  }

  double now = 0.0;
  if (!partial_.empty())
    now = std::isfinite(report_.radio_end) ? report_.radio_end : cfg_.horizon_s;
  const double tscale = cfg_.time_threshold_s;
  obs_[n_max_] = now / tscale;

  std::vector<double> server_free(cfg_.num_satellites, 0.0);
  for (const Decision& d : partial_) {
    if (d.location == 0) continue;
    const double end = report_.tasks[d.task].comp_end;
    const int j = d.location - 1;
    if (std::isfinite(end) && end > server_free[j]) server_free[j] = end;
  }
  for (int j = 0; j < cfg_.num_satellites; ++j) {
    const double g = sat_angle(cfg_, j, now);
    const int base = n_max_ + 1 + 3 * j;
    obs_[base] = std::sin(g);
    obs_[base + 1] = std::cos(g);
    obs_[base + 2] = std::max(0.0, server_free[j] - now) / tscale;
  }
  obs_[n_max_ + 1 + 3 * m_max_] =
      static_cast<double>(partial_.size()) / n_max_;
}

void Env::write_trace(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  for (const TraceStep& s : trace_) {
    out << "{\"state_hash\":" << s.state_hash << ",\"task\":" << s.action.task
        << ",\"location\":" << s.action.location
        << ",\"redundancy\":" << s.action.redundancy
        << ",\"reward\":" << s.reward << "}\n";
  }
  out.precision(old_precision);
}

std::uint64_t hash_observation(const std::vector<double>& obs) {
  std::uint64_t h = 14695981039346656037ull;
  for (double d : obs) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &d, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace satoff
