#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "satoff/env.hpp"
#include "satoff/geometry.hpp"
#include "satoff/rng.hpp"
#include "satoff/scenario.hpp"
#include "satoff/timeline.hpp"
#include "test_util.hpp"

using namespace satoff;
using namespace satoff::testutil;

namespace {

ScenarioConfig tiny3x3() {
  return load_scenario_file(std::string(SCENARIO_DIR) + "/tiny3x3.scenario");
}

ScenarioConfig table2() {
  return load_scenario_file(std::string(SCENARIO_DIR) + "/table2.scenario");
}

Decision random_action(const Env& env, Rng& rng) {
  const ActionMask mask = env.action_mask();
  std::vector<int> open;
  for (int i = 0; i < env.n_max(); ++i) {
    if (mask.task[i]) open.push_back(i);
  }
  Decision d;
  d.task = open[rng.below(open.size())];
  d.location = static_cast<int>(rng.below(env.config().num_satellites + 1));
  d.redundancy = rng.coin() ? 1 : 0;
  return d;
}

}  // namespace

TEST_CASE("reset: anchors, unassigned tasks, zeroed clock and backlog") {
  const ScenarioConfig cfg = table2();
  Env env(cfg);
  CHECK(env.obs_dim() == 30 + 1 + 3 * 25 + 1);
  const std::vector<double>& obs = env.obs();
  for (int i = 0; i < 30; ++i) CHECK(obs[i] == -1.0);
  CHECK(obs[30] == 0.0);  // clock
  for (int j = 0; j < 25; ++j) {
    const double g = sat_angle(cfg, j, 0.0);
    CHECK(obs[31 + 3 * j] == std::sin(g));
    CHECK(obs[31 + 3 * j + 1] == std::cos(g));
    CHECK(obs[31 + 3 * j + 2] == 0.0);
  }
  CHECK(obs.back() == 0.0);  // step fraction
  // the train really does start at the documented anchor
  CHECK(sat_angle(cfg, 0, 0.0) == doctest::Approx(344.0 * kDegToRad).epsilon(1e-15));
  CHECK(sat_angle(cfg, 1, 0.0) == doctest::Approx(346.0 * kDegToRad).epsilon(1e-15));

  Env again(cfg);
  CHECK(again.obs() == env.obs());
  env.reset(123);
  CHECK(env.obs() == again.obs());  // seed cannot change deterministic dynamics
}

TEST_CASE("padding: observations zero and masks closed beyond N and M") {
  EnvOptions opt;
  opt.n_max = 5;
  opt.m_max = 4;
  Env env(tiny3x3(), opt);
  CHECK(env.obs_dim() == 5 + 1 + 12 + 1);
  CHECK(env.head_dims() == std::array<int, 3>{5, 5, 2});
  CHECK(env.flat_action_dim() == 5 * 5 * 2);
  const std::vector<double>& obs = env.obs();
  CHECK(obs[3] == 0.0);
  CHECK(obs[4] == 0.0);
  const ActionMask mask = env.action_mask();
  CHECK(mask.task == std::vector<char>{1, 1, 1, 0, 0});
  CHECK(mask.location == std::vector<char>{1, 1, 1, 1, 0});
  CHECK(mask.redundancy == std::vector<char>{1, 1});
  // the padded satellite slot carries no signal
  CHECK(obs[5 + 1 + 3 * 3] == 0.0);
  CHECK(obs[5 + 1 + 3 * 3 + 1] == 0.0);

  EnvOptions bad;
  bad.n_max = 2;
  CHECK_THROWS_AS(Env(tiny3x3(), bad), std::invalid_argument);
}

TEST_CASE("step: reward is the constant minus the marginal cost") {
  ScenarioConfig cfg = tiny3x3();
  Env env(cfg);
  // a single local task: chain [0, 2] s, energy 5.4 W * 2 s
  const EnvStep s = env.step({0, 0, 0});
  CHECK_FALSE(s.done);
  CHECK(s.reward == doctest::Approx(-12.8).epsilon(1e-12));

  cfg.reward_constant = 10.0;
  Env shifted(cfg);
  const EnvStep t = shifted.step({0, 0, 0});
  CHECK(t.reward == doctest::Approx(10.0 - 12.8).epsilon(1e-12));
}

TEST_CASE("step: assigned task encoding and satellite features update") {
  EnvOptions opt;
  opt.m_max = 4;
  const ScenarioConfig cfg = tiny3x3();
  Env env(cfg, opt);
  env.step({0, 2, 1});
  const std::vector<double>& obs = env.obs();
  CHECK(obs[0] == doctest::Approx((2 * 2 + 1 + 1) / 10.0).epsilon(1e-15));
  CHECK(obs[1] == -1.0);
  CHECK(obs[2] == -1.0);

  const EvaluationReport& rep = env.report();
  const double now = rep.radio_end;
  CHECK(obs[3 + 0] == now / cfg.time_threshold_s);
  const int base = 3 + 1 + 3 * 1;  // satellite index 1 backs location 2
  CHECK(obs[base] == std::sin(sat_angle(cfg, 1, now)));
  CHECK(obs[base + 1] == std::cos(sat_angle(cfg, 1, now)));
  const double backlog = rep.tasks[0].comp_end - now;
  CHECK(backlog > 0.0);
  CHECK(obs[base + 2] == doctest::Approx(backlog / cfg.time_threshold_s).epsilon(1e-12));
  CHECK(obs[3 + 1 + 3 * 0 + 2] == 0.0);  // satellite 0 idle
  CHECK(obs.back() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("mask: tracks assignments and the contract rejects violations") {
  Env env(tiny3x3());
  CHECK(env.action_mask().task == std::vector<char>{1, 1, 1});
  env.step({1, 0, 0});
  CHECK(env.action_mask().task == std::vector<char>{1, 0, 1});
  CHECK_THROWS_AS(env.step({1, 0, 0}), std::logic_error);       // already assigned
  CHECK_THROWS_AS(env.step({0, 4, 0}), std::logic_error);       // no such satellite
  CHECK_THROWS_AS(env.step({0, -1, 0}), std::logic_error);
  CHECK_THROWS_AS(env.step({0, 0, 2}), std::logic_error);
  CHECK_THROWS_AS(env.step({5, 0, 0}), std::logic_error);       // no such task
  env.step({0, 1, 1});
  CHECK_FALSE(env.done());
  const EnvStep last = env.step({2, 3, 0});
  CHECK(last.done);
  CHECK(env.done());
  CHECK_THROWS_AS(env.step({0, 0, 0}), std::logic_error);       // episode over
  CHECK_NOTHROW(validate_schedule(env.partial(), env.config()));
}

TEST_CASE("episode: returns telescope to the full-schedule cost") {
  Rng rng(404);
  for (int trial = 0; trial < 30; ++trial) {
    ScenarioConfig cfg;
    if (trial % 3 == 0) {
      cfg = tiny3x3();
    } else {
      cfg = random_config(rng, 2 + static_cast<int>(rng.below(4)),
                          1 + static_cast<int>(rng.below(4)));
    }
    Env env(cfg);
    double total = 0.0;
    double last_reward = 0.0;
    while (!env.done()) {
      last_reward = env.step(random_action(env, rng)).reward;
      total += last_reward;
    }
    const EvaluationReport full = evaluate_schedule(env.partial(), cfg);
    CHECK(full.cost == env.report().cost);  // prefix-of-everything is the real thing
    const int violations = (full.feasible_time ? 0 : 1) +
                           (full.feasible_reliability ? 0 : 1) +
                           (full.feasible_privacy ? 0 : 1);
    const double capped =
        std::isfinite(full.cost) ? full.cost : env.options().cost_cap;
    const double expect = cfg.num_tasks() * cfg.reward_constant - capped -
                          env.options().penalty * violations;
    CHECK(total == doctest::Approx(expect).epsilon(1e-9));
    (void)last_reward;
  }
}

TEST_CASE("terminal penalty: a reliability-only violation costs exactly one Lambda") {
  ScenarioConfig cfg = tiny3x3();
  cfg.failure_threshold = 1e-9;  // any offload now breaks reliability
  Env env(cfg);
  env.step({0, 1, 1});   // offloaded, redundant, strong channel: privacy 1
  env.step({1, 0, 0});   // local tasks push average privacy above 0.6
  const double before = env.report().cost;
  const EnvStep final_step = env.step({2, 0, 0});
  const EvaluationReport& rep = env.report();
  REQUIRE(rep.feasible_time);
  REQUIRE(rep.feasible_privacy);
  REQUIRE_FALSE(rep.feasible_reliability);
  const double marginal = rep.cost - before;
  CHECK(final_step.reward ==
        doctest::Approx(-marginal - 100.0).epsilon(1e-12));

  EnvOptions opt;
  opt.penalty = 7.5;
  Env custom(cfg, opt);
  custom.step({0, 1, 1});
  custom.step({1, 0, 0});
  const double before2 = custom.report().cost;
  const EnvStep last2 = custom.step({2, 0, 0});
  CHECK(last2.reward ==
        doctest::Approx(-(custom.report().cost - before2) - 7.5).epsilon(1e-12));
}

TEST_CASE("dead radio: one capped loss, then flat rewards, then full penalty") {
  ScenarioConfig cfg = tiny3x3();
  cfg.anchor_deg = 180.0;  // far side at reset, so every upload has to wait
  cfg.horizon_s = 100.0;   // and the wait blows straight through this deadline
  Env env(cfg);
  const EnvStep first = env.step({0, 1, 0});
  CHECK(first.reward == doctest::Approx(-1e12).epsilon(1e-12));
  CHECK_FALSE(std::isfinite(env.report().cost));
  const EnvStep second = env.step({1, 0, 0});
  CHECK(second.reward == 0.0);  // capped cost cannot grow further
  const EnvStep third = env.step({2, 2, 1});
  CHECK(third.reward == -300.0);  // all three constraints count as violated
  CHECK(std::isfinite(env.obs()[3]));  // clock feature falls back to the horizon
}

TEST_CASE("replay: a recorded action sequence reproduces rewards bit for bit") {
  const ScenarioConfig cfg = tiny3x3();
  Rng rng(777);
  Env env(cfg);
  while (!env.done()) env.step(random_action(env, rng));
  const std::vector<TraceStep> recorded = env.trace();
  REQUIRE(recorded.size() == 3);

  Env replay(cfg);
  for (const TraceStep& s : recorded) {
    CHECK(hash_observation(replay.obs()) == s.state_hash);
    const EnvStep r = replay.step(s.action);
    CHECK(r.reward == s.reward);
  }

  std::ostringstream out;
  env.write_trace(out);
  std::istringstream lines(out.str());
  std::string line;
  int parsed = 0;
  while (std::getline(lines, line)) {
    const nlohmann::json j = nlohmann::json::parse(line);
    CHECK(j["task"] == recorded[parsed].action.task);
    CHECK(j["location"] == recorded[parsed].action.location);
    CHECK(j["redundancy"] == recorded[parsed].action.redundancy);
    CHECK(double(j["reward"]) == doctest::Approx(recorded[parsed].reward).epsilon(1e-15));
    CHECK(j["state_hash"] == recorded[parsed].state_hash);
    ++parsed;
  }
  CHECK(parsed == 3);
}
