#include "satoff/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <thread>

#include "satoff/baselines.hpp"
#include "satoff/csvio.hpp"
#include "satoff/dqn.hpp"
#include "satoff/env.hpp"
#include "satoff/mlp.hpp"
#include "satoff/oracle.hpp"
#include "satoff/ppo.hpp"
#include "satoff/scenario.hpp"
#include "satoff/timeline.hpp"
#include "satoff/version.hpp"

namespace fs = std::filesystem;

namespace satoff {
namespace {

struct CliError {
  int code = 1;
  std::string message;
};

ScenarioConfig load_scenario_checked(const std::string& path) {
  if (!fs::exists(path)) throw CliError{2, "scenario file not found: " + path};
  try {
    return load_scenario_file(path);
  } catch (const std::exception& e) {
    throw CliError{1, e.what()};
  }
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// one evaluation outcome, in the column order shared by evaluate and sweep
struct EvalRow {
  double total_time = 0.0;
  double energy = 0.0;
  double failure = 0.0;
  double privacy = 0.0;
  double cost = 0.0;
  bool feasible = false;
};

EvalRow row_from_report(const EvaluationReport& rep) {
  return {rep.total_time, rep.energy, rep.failure_prob, rep.privacy, rep.cost,
          rep.feasible()};
}

std::vector<std::string> metric_cells(const EvalRow& r) {
  return {format_double(r.total_time), format_double(r.energy), format_double(r.failure),
          format_double(r.privacy),    format_double(r.cost),   r.feasible ? "1" : "0"};
}

// knobs consumed by the policies that need them; the rest ignore them
struct PolicyKnobs {
  int samples = 1000;            // random-policy pool size
  std::uint64_t cap = 10'000'000;  // oracle state budget
  long long steps = 20'000;      // in-cell training budget for ppo/dqn
  int hidden = 64;
};

EvalRow run_policy(const ScenarioConfig& cfg, const std::string& policy,
                   std::uint64_t seed, const PolicyKnobs& knobs) {
  if (policy == "uniform") return row_from_report(uniform_policy(cfg).report);
  if (policy == "random")
    return row_from_report(random_policy(cfg, knobs.samples, seed).report);
  if (policy == "oracle") {
    const OracleResult r = brute_force_oracle(cfg, knobs.cap);
    return row_from_report(r.has_feasible ? r.best_feasible_report : r.best_any_report);
  }
  if (policy == "ppo") {
    PpoHyper h;
    h.total_timesteps = knobs.steps;
    h.hidden = knobs.hidden;
    return row_from_report(train_ppo(cfg, h, seed).greedy_report);
  }
  if (policy == "dqn") {
    DqnHyper h;
    h.total_timesteps = knobs.steps;
    h.hidden = knobs.hidden;
    return row_from_report(dqn_train(cfg, h, seed).greedy_report);
  }
  throw CliError{1, "unknown policy: " + policy};
}

// greedy rollout of whichever network the checkpoint holds
Schedule checkpoint_schedule(const std::vector<CheckpointEntry>& entries,
                             const ScenarioConfig& cfg) {
  Env env(cfg);
  auto find = [&](const std::string& name) -> const CheckpointEntry* {
    for (const CheckpointEntry& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  };
  const auto heads = env.head_dims();
  if (const CheckpointEntry* a = find("actor")) {
    Mlp actor = mlp_from_entry(*a);
    if (actor.input_dim() != env.obs_dim() ||
        actor.output_dim() != heads[0] + heads[1] + heads[2])
      throw CliError{1, "checkpoint actor dimensions do not match the scenario"};
    ActorCritic net;
    net.actor = std::move(actor);
    net.critic = Mlp({env.obs_dim(), 1});
    net.heads = heads;
    return greedy_schedule(net, env);
  }
  if (const CheckpointEntry* qe = find("q")) {
    Mlp q = mlp_from_entry(*qe);
    if (q.input_dim() != env.obs_dim() || q.output_dim() != env.flat_action_dim())
      throw CliError{1, "checkpoint q dimensions do not match the scenario"};
    env.reset();
    Schedule out;
    while (!env.done()) {
      const int flat = dqn_greedy_action(q, env.obs(), flat_action_mask(env));
      const Decision d = unflatten_action(flat, env.m_max());
      out.push_back(d);
      env.step(d);
    }
    return out;
  }
  throw CliError{1, "checkpoint holds neither an actor nor a q network"};
}

ScenarioConfig apply_axis(ScenarioConfig cfg, const std::string& axis, double value) {
  if (axis == "tasks") {
    const int n = static_cast<int>(std::llround(value));
    if (n < 1 || static_cast<double>(n) != value)
      throw CliError{1, "tasks axis needs positive integer values"};
    std::vector<double> sizes(n);
    for (int i = 0; i < n; ++i)
      sizes[i] = cfg.task_sizes_mb[i % cfg.task_sizes_mb.size()];
    cfg.task_sizes_mb = std::move(sizes);
    return cfg;
  }
  if (axis == "reliability") {
    if (value <= 0.0 || value >= 100.0)
      throw CliError{1, "reliability axis needs percentages in (0, 100)"};
    cfg.failure_threshold = 1.0 - value / 100.0;
    return cfg;
  }
  if (axis == "privacy") {
    if (value < 0.0 || value > 100.0)
      throw CliError{1, "privacy axis needs percentages in [0, 100]"};
    cfg.privacy_threshold = value / 100.0;
    return cfg;
  }
  throw CliError{1, "unknown axis: " + axis};
}

// ---------------------------------------------------------------- train ----

struct TrainArgs {
  std::string scenario, out, algo = "ppo", lr_mode = "linear";
  std::uint64_t seed = 1;
  long long steps = 1'000'000;
  double lr = 1e-3;
  int hidden = 64;
  PpoHyper ppo;
  DqnHyper dqn;
};

void run_train(const TrainArgs& a, const std::string& command) {
  const ScenarioConfig cfg = load_scenario_checked(a.scenario);
  fs::create_directories(a.out);

  std::vector<LogRow> log;
  EvaluationReport rep;
  std::vector<CheckpointEntry> entries;
  if (a.algo == "ppo") {
    PpoHyper h = a.ppo;
    h.total_timesteps = a.steps;
    h.lr_init = a.lr;
    h.hidden = a.hidden;
    h.lr_decay = a.lr_mode == "linear";
    const TrainResult r = train_ppo(cfg, h, a.seed);
    log = r.log;
    rep = r.greedy_report;
    entries.push_back(mlp_to_entry("actor", r.net.actor));
    entries.push_back(mlp_to_entry("critic", r.net.critic));
  } else {
    DqnHyper h = a.dqn;
    h.total_timesteps = a.steps;
    h.lr = a.lr;
    h.hidden = a.hidden;
    const DqnResult r = dqn_train(cfg, h, a.seed);
    log = r.log;
    rep = r.greedy_report;
    entries.push_back(mlp_to_entry("q", r.q));
  }

  CsvWriter w(a.out + "/train_log.csv");
  write_provenance(w, cfg, std::to_string(a.seed), command);
  w.row({"timestep", "mean_return", "mean_cost", "total_time", "energy", "failure",
         "privacy", "feasible_fraction", "lr"});
  for (const LogRow& r : log) {
    w.row({std::to_string(r.timestep), format_double(r.mean_return),
           format_double(r.mean_cost), format_double(r.total_time),
           format_double(r.energy), format_double(r.failure), format_double(r.privacy),
           format_double(r.feasible_fraction), format_double(r.lr)});
  }
  save_checkpoint_file(a.out + "/checkpoint.bin", entries);

  std::cout << "trained " << a.algo << " on " << cfg.name << " to timestep "
            << log.back().timestep << "\n"
            << "greedy cost: " << format_double(rep.cost) << "\n"
            << "greedy feasible: " << (rep.feasible() ? "yes" : "no") << "\n"
            << "wrote " << a.out << "/train_log.csv and " << a.out << "/checkpoint.bin\n";
}

// ------------------------------------------------------------- evaluate ----

struct EvaluateArgs {
  std::string scenario, out, policy, checkpoint;
  std::vector<std::uint64_t> seeds{1};
  PolicyKnobs knobs;
};

void run_evaluate(const EvaluateArgs& a, const std::string& command) {
  if (a.policy.empty() == a.checkpoint.empty())
    throw CliError{1, "provide exactly one of --policy or --checkpoint"};
  const ScenarioConfig cfg = load_scenario_checked(a.scenario);
  fs::create_directories(a.out);

  std::string label = a.policy;
  std::vector<EvalRow> rows;
  if (!a.checkpoint.empty()) {
    label = "checkpoint";
    std::vector<CheckpointEntry> entries;
    try {
      entries = load_checkpoint_file(a.checkpoint);
    } catch (const std::exception& e) {
      throw CliError{1, e.what()};
    }
    const Schedule sched = checkpoint_schedule(entries, cfg);
    const EvalRow row = row_from_report(evaluate_schedule(sched, cfg));
    rows.assign(a.seeds.size(), row);  // greedy rollouts do not depend on the seed
  } else {
    for (std::uint64_t seed : a.seeds) rows.push_back(run_policy(cfg, a.policy, seed, a.knobs));
  }

  std::vector<std::string> seed_strs;
  for (std::uint64_t s : a.seeds) seed_strs.push_back(std::to_string(s));

  CsvWriter w(a.out + "/evaluate.csv");
  write_provenance(w, cfg, join(seed_strs, ","), command);
  w.row({"seed", "policy", "total_time", "energy", "failure", "privacy", "cost",
         "feasible"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<std::string> cells{seed_strs[i], label};
    for (std::string& c : metric_cells(rows[i])) cells.push_back(std::move(c));
    w.row(cells);
  }

  const double n = static_cast<double>(rows.size());
  EvalRow mean;
  double feasible_frac = 0.0;
  for (const EvalRow& r : rows) {
    mean.total_time += r.total_time / n;
    mean.energy += r.energy / n;
    mean.failure += r.failure / n;
    mean.privacy += r.privacy / n;
    mean.cost += r.cost / n;
    feasible_frac += (r.feasible ? 1.0 : 0.0) / n;
  }
  w.row({"mean", label, format_double(mean.total_time), format_double(mean.energy),
         format_double(mean.failure), format_double(mean.privacy),
         format_double(mean.cost), format_double(feasible_frac)});

  auto stddev = [&](auto pick) {
    double acc = 0.0;
    for (const EvalRow& r : rows) {
      const double d = pick(r) - pick(mean);
      acc += d * d;
    }
    return std::sqrt(acc / n);
  };
  w.comment("std: total_time=" + format_double(stddev([](const EvalRow& r) { return r.total_time; })) +
            " energy=" + format_double(stddev([](const EvalRow& r) { return r.energy; })) +
            " failure=" + format_double(stddev([](const EvalRow& r) { return r.failure; })) +
            " privacy=" + format_double(stddev([](const EvalRow& r) { return r.privacy; })) +
            " cost=" + format_double(stddev([](const EvalRow& r) { return r.cost; })));

  std::cout << "evaluated " << label << " on " << cfg.name << " over " << rows.size()
            << " seed(s)\n"
            << "mean cost: " << format_double(mean.cost) << "\n"
            << "feasible fraction: " << format_double(feasible_frac) << "\n"
            << "wrote " << a.out << "/evaluate.csv\n";
}

// ---------------------------------------------------------------- sweep ----

struct SweepArgs {
  std::string scenario, out, axis;
  std::vector<double> values;
  std::vector<std::string> policies;
  std::vector<std::uint64_t> seeds{1};
  PolicyKnobs knobs;
};

void run_sweep(const SweepArgs& a, const std::string& command) {
  const ScenarioConfig base = load_scenario_checked(a.scenario);
  if (a.values.empty()) throw CliError{1, "sweep needs at least one --values entry"};
  if (a.policies.empty()) throw CliError{1, "sweep needs at least one --policies entry"};
  fs::create_directories(a.out);

  struct Cell {
    double value;
    std::string policy;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double v : a.values) {
    apply_axis(base, a.axis, v);  // validate every value up front
    for (const std::string& p : a.policies)
      for (std::uint64_t s : a.seeds) cells.push_back({v, p, s});
  }

  // cells are independent; run them concurrently but merge in cell order
  std::vector<EvalRow> rows(cells.size());
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < cells.size(); start += workers) {
    const std::size_t stop = std::min(cells.size(), start + workers);
    std::vector<std::future<EvalRow>> batch;
    for (std::size_t i = start; i < stop; ++i) {
      batch.push_back(std::async(std::launch::async, [&, i] {
        const Cell& c = cells[i];
        return run_policy(apply_axis(base, a.axis, c.value), c.policy, c.seed, a.knobs);
      }));
    }
    for (std::size_t i = start; i < stop; ++i) rows[i] = batch[i - start].get();
  }

  std::vector<std::string> seed_strs;
  for (std::uint64_t s : a.seeds) seed_strs.push_back(std::to_string(s));

  CsvWriter w(a.out + "/sweep.csv");
  write_provenance(w, base, join(seed_strs, ","), command);
  w.row({"axis", "value", "policy", "seed", "total_time", "energy", "failure", "privacy",
         "cost", "feasible"});
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::vector<std::string> cells_out{a.axis, format_double(cells[i].value),
                                       cells[i].policy, std::to_string(cells[i].seed)};
    for (std::string& c : metric_cells(rows[i])) cells_out.push_back(std::move(c));
    w.row(cells_out);
  }
  std::cout << "swept " << a.axis << " over " << a.values.size() << " value(s), "
            << cells.size() << " cell(s)\n"
            << "wrote " << a.out << "/sweep.csv\n";
}

// --------------------------------------------------------------- oracle ----

struct OracleArgs {
  std::string scenario, out;
  std::uint64_t cap = 10'000'000;
};

void run_oracle(const OracleArgs& a, const std::string& command) {
  const ScenarioConfig cfg = load_scenario_checked(a.scenario);
  fs::create_directories(a.out);
  const OracleResult r = brute_force_oracle(cfg, a.cap);

  using json = nlohmann::ordered_json;
  auto pack = [](const Schedule& sched, const EvaluationReport& rep) {
    json o;
    o["cost"] = rep.cost;
    o["total_time"] = rep.total_time;
    o["energy"] = rep.energy;
    o["failure"] = rep.failure_prob;
    o["privacy"] = rep.privacy;
    o["feasible"] = rep.feasible();
    o["schedule"] = json::array();
    for (const Decision& d : sched)
      o["schedule"].push_back({{"task", d.task},
                               {"location", d.location},
                               {"redundancy", d.redundancy}});
    return o;
  };
  json j;
  j["artifact_version"] = kArtifactVersion;
  j["scenario"] = cfg.name;
  j["scenario_hash"] = format_u64_hex(scenario_hash(cfg));
  j["command"] = command;
  j["search_space"] = oracle_state_count(cfg);
  j["states_examined"] = r.states_examined;
  j["has_feasible"] = r.has_feasible;
  j["best_feasible"] = r.has_feasible ? pack(r.best_feasible, r.best_feasible_report)
                                      : json(nullptr);
  j["best_any"] = pack(r.best_any, r.best_any_report);

  std::ofstream out(a.out + "/oracle.json", std::ios::binary | std::ios::trunc);
  if (!out) throw CliError{1, "cannot open " + a.out + "/oracle.json"};
  out << j.dump(2) << "\n";

  std::cout << "oracle examined " << r.states_examined << " schedule(s) on " << cfg.name
            << "\n"
            << "best cost: "
            << format_double(r.has_feasible ? r.best_feasible_report.cost
                                            : r.best_any_report.cost)
            << (r.has_feasible ? " (feasible)" : " (no feasible schedule)") << "\n"
            << "wrote " << a.out << "/oracle.json\n";
}

std::string default_out_dir() {
  const char* root = std::getenv("SATOFF_OUT_ROOT");
  return root && *root ? std::string(root) : std::string("out");
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"privacy-aware LEO offloading: simulator, trainers, and exporters"};
  app.require_subcommand(1);

  TrainArgs ta;
  EvaluateArgs ea;
  SweepArgs sa;
  OracleArgs oa;
  ta.out = ea.out = sa.out = oa.out = default_out_dir();

  CLI::App* train = app.add_subcommand("train", "train a policy; write log CSV + checkpoint");
  train->add_option("--scenario", ta.scenario, "scenario file")->required();
  train->add_option("--seed", ta.seed, "training seed")->capture_default_str();
  train->add_option("--out", ta.out, "output directory")->capture_default_str();
  train->add_option("--algo", ta.algo, "training algorithm")
      ->check(CLI::IsMember({"ppo", "dqn"}))
      ->capture_default_str();
  train->add_option("--steps", ta.steps, "total environment steps")->capture_default_str();
  train->add_option("--lr", ta.lr, "initial learning rate")->capture_default_str();
  train->add_option("--lr-mode", ta.lr_mode, "learning-rate schedule")
      ->check(CLI::IsMember({"linear", "fixed"}))
      ->capture_default_str();
  train->add_option("--lr-final", ta.ppo.lr_final, "linear-mode endpoint")
      ->capture_default_str();
  train->add_option("--hidden", ta.hidden, "hidden width of every network")
      ->capture_default_str();
  train->add_option("--horizon", ta.ppo.horizon, "steps per update round")
      ->capture_default_str();
  train->add_option("--epochs", ta.ppo.epochs, "optimisation passes per round")
      ->capture_default_str();
  train->add_option("--minibatch", ta.ppo.minibatch, "minibatch size")->capture_default_str();
  train->add_option("--clip", ta.ppo.clip_eps, "surrogate clip range")->capture_default_str();
  train->add_option("--entropy-coef", ta.ppo.entropy_coef, "entropy bonus weight")
      ->capture_default_str();
  train->add_option("--discount", ta.ppo.discount, "discount factor")->capture_default_str();
  train->add_option("--gae-lambda", ta.ppo.gae_lambda, "advantage smoothing")
      ->capture_default_str();
  train->add_option("--eval-episodes", ta.ppo.eval_episodes, "episodes per log row")
      ->capture_default_str();
  train->add_option("--penalty", ta.ppo.penalty, "terminal charge per violation")
      ->capture_default_str();
  train->add_option("--batch", ta.dqn.batch, "dqn replay batch")->capture_default_str();
  train->add_option("--capacity", ta.dqn.capacity, "dqn replay capacity")
      ->capture_default_str();
  train->add_option("--learn-start", ta.dqn.learn_start, "dqn warmup steps")
      ->capture_default_str();
  train->add_option("--target-sync", ta.dqn.target_sync, "dqn target refresh period")
      ->capture_default_str();
  train->add_option("--eps-decay", ta.dqn.eps_decay_steps, "dqn exploration decay steps")
      ->capture_default_str();
  train->add_option("--log-every", ta.dqn.log_every, "dqn log period")->capture_default_str();

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "evaluate a baseline or checkpoint; write metrics CSV");
  evaluate->add_option("--scenario", ea.scenario, "scenario file")->required();
  evaluate->add_option("--policy", ea.policy, "baseline policy")
      ->check(CLI::IsMember({"random", "uniform", "oracle"}));
  evaluate->add_option("--checkpoint", ea.checkpoint, "trained checkpoint file");
  evaluate->add_option("--seeds", ea.seeds, "evaluation seeds")
      ->delimiter(',')
      ->capture_default_str();
  evaluate->add_option("--samples", ea.knobs.samples, "random-policy pool size")
      ->capture_default_str();
  evaluate->add_option("--cap", ea.knobs.cap, "oracle state budget")->capture_default_str();
  evaluate->add_option("--out", ea.out, "output directory")->capture_default_str();

  CLI::App* sweep = app.add_subcommand("sweep", "evaluate policies across an axis; long CSV");
  sweep->add_option("--scenario", sa.scenario, "scenario file")->required();
  sweep->add_option("--axis", sa.axis, "swept quantity")
      ->check(CLI::IsMember({"tasks", "reliability", "privacy"}))
      ->required();
  sweep->add_option("--values", sa.values, "axis values")->delimiter(',')->required();
  sweep->add_option("--policies", sa.policies, "policies to compare")
      ->delimiter(',')
      ->required();
  sweep->add_option("--seeds", sa.seeds, "seeds per cell")->delimiter(',')->capture_default_str();
  sweep->add_option("--samples", sa.knobs.samples, "random-policy pool size")
      ->capture_default_str();
  sweep->add_option("--steps", sa.knobs.steps, "in-cell training budget")
      ->capture_default_str();
  sweep->add_option("--hidden", sa.knobs.hidden, "in-cell network width")
      ->capture_default_str();
  sweep->add_option("--cap", sa.knobs.cap, "oracle state budget")->capture_default_str();
  sweep->add_option("--out", sa.out, "output directory")->capture_default_str();

  CLI::App* oracle = app.add_subcommand("oracle", "exhaustive search; write JSON");
  oracle->add_option("--scenario", oa.scenario, "scenario file")->required();
  oracle->add_option("--cap", oa.cap, "state budget before refusing")->capture_default_str();
  oracle->add_option("--out", oa.out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  std::vector<std::string> given(argv + 1, argv + argc);
  const std::string command = join(given, " ");
  try {
    if (train->parsed()) run_train(ta, command);
    if (evaluate->parsed()) run_evaluate(ea, command);
    if (sweep->parsed()) run_sweep(sa, command);
    if (oracle->parsed()) run_oracle(oa, command);
    return 0;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.emplace_back("satoff");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const std::string& s : full) argv.push_back(s.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace satoff
