#include "satoff/baselines.hpp"

#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "satoff/geometry.hpp"
#include "satoff/rng.hpp"

namespace satoff {
namespace {

// feasible beats infeasible, then strictly lower cost; ties keep the incumbent
bool improves(const EvaluationReport& challenger, const EvaluationReport& incumbent) {
  if (challenger.feasible() != incumbent.feasible()) return challenger.feasible();
  return challenger.cost < incumbent.cost;
}

}  // namespace

PolicyResult random_policy(const ScenarioConfig& cfg, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("random_policy: need at least one sample");
  const int n = cfg.num_tasks();
  const int m = cfg.num_satellites;
  Rng rng(seed);
  PolicyResult best;
  std::vector<int> order(n);
  for (int k = 0; k < samples; ++k) {
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    Schedule sched(n);
    for (int i = 0; i < n; ++i) {
      sched[i].task = order[i];
      sched[i].location = static_cast<int>(rng.below(static_cast<std::uint64_t>(m) + 1));
      sched[i].redundancy = rng.coin() ? 1 : 0;
    }
    EvaluationReport rep = evaluate_schedule(sched, cfg);
    if (k == 0 || improves(rep, best.report)) {
      best.schedule = std::move(sched);
      best.report = std::move(rep);
    }
  }
  best.found_feasible = best.report.feasible();
  return best;
}

PolicyResult uniform_policy(const ScenarioConfig& cfg) {
  const int n = cfg.num_tasks();
  // ascending index is the counterclockwise direction along the orbit
  std::vector<int> visible;
  for (int j = 0; j < cfg.num_satellites; ++j) {
    if (is_visible(cfg, sat_angle(cfg, j, 0.0))) visible.push_back(j);
  }
  PolicyResult out;
  out.schedule.resize(n);
  for (int i = 0; i < n; ++i) {
    out.schedule[i].task = i;
    out.schedule[i].location =
        visible.empty() ? 0 : visible[i % visible.size()] + 1;
    out.schedule[i].redundancy = 0;
  }
  out.report = evaluate_schedule(out.schedule, cfg);
  out.found_feasible = out.report.feasible();
  return out;
}

}  // namespace satoff
