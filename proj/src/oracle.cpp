#include "satoff/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace satoff {

double oracle_state_count(const ScenarioConfig& cfg) {
  const double options = 2.0 * (cfg.num_satellites + 1);
  double count = 1.0;
  for (int i = 1; i <= cfg.num_tasks(); ++i) count *= options * i;
  return count;
}

OracleResult brute_force_oracle(const ScenarioConfig& cfg, std::uint64_t cap) {
  const double count = oracle_state_count(cfg);
  if (count > static_cast<double>(cap)) {
    std::ostringstream msg;
    msg << "oracle: search space holds " << count << " schedules, cap is " << cap;
    throw std::runtime_error(msg.str());
  }

  const int n = cfg.num_tasks();
  const int m = cfg.num_satellites;
  const int options = 2 * (m + 1);  // digit = location * 2 + redundancy

  OracleResult out;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> digit(n);
  Schedule sched(n);
  do {
    std::fill(digit.begin(), digit.end(), 0);
    for (;;) {
      for (int i = 0; i < n; ++i) {
        sched[i].task = order[i];
        sched[i].location = digit[i] / 2;
        sched[i].redundancy = digit[i] % 2;
      }
      const EvaluationReport rep = evaluate_schedule(sched, cfg);
      if (out.states_examined == 0 || rep.cost < out.best_any_report.cost) {
        out.best_any = sched;
        out.best_any_report = rep;
      }
      if (rep.feasible() &&
          (!out.has_feasible || rep.cost < out.best_feasible_report.cost)) {
        out.has_feasible = true;
        out.best_feasible = sched;
        out.best_feasible_report = rep;
      }
      ++out.states_examined;

      int pos = n - 1;  // last position spins fastest: lexicographic ascent
      while (pos >= 0 && ++digit[pos] == options) digit[pos--] = 0;
      if (pos < 0) break;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

}  // namespace satoff
