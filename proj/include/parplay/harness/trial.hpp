#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "parplay/harness/engine.hpp"
#include "parplay/harness/task_gen.hpp"
#include "parplay/io/json_io.hpp"

namespace parplay {

struct TrialConfig {
  std::uint64_t seed = 0;
  std::optional<TaskSpec> task;  // generated from `seed` in `workspace` when absent
  Workspace workspace;
  std::optional<WorldState> start;  // rest poses of the task when absent
  PolicyKind robot = PolicyKind::BayesNash;
  PolicyKind human = PolicyKind::SelfishNash;
  int robot_agent = 0;
  LoopParams loop;
  double max_trial_time = 60.0;
  bool log_states = true;
  bool log_cost_matrices = false;

  PolicyKind policy_of(int agent) const { return agent == robot_agent ? robot : human; }

  void validate() const {
    loop.validate();
    if (robot_agent != 0 && robot_agent != 1) throw std::invalid_argument("TrialConfig: robot_agent must be 0 or 1");
    if (!(max_trial_time > 0.0)) throw std::invalid_argument("TrialConfig: max_trial_time must be > 0");
    if (robot == PolicyKind::External || human == PolicyKind::External)
      throw std::invalid_argument("TrialConfig: external control is only available in the play service");
    workspace.validate();
    if (task) task->validate();
  }
};

struct TrialMetrics {
  double total_task_time = 0.0;
  PerAgent<double> agent_time{0.0, 0.0};
  std::size_t safety_stops = 0;
  std::size_t replans = 0;
  bool timed_out = false;

  friend bool operator==(const TrialMetrics&, const TrialMetrics&) = default;
};

inline json metrics_to_json(const TrialMetrics& m) {
  return json{{"total_task_time", m.total_task_time},
              {"agent_time", m.agent_time},
              {"safety_stops", m.safety_stops},
              {"replans", m.replans},
              {"timed_out", m.timed_out}};
}

inline TrialMetrics metrics_from_json(const json& j) {
  TrialMetrics m;
  m.total_task_time = j.at("total_task_time").get<double>();
  m.agent_time = j.at("agent_time").get<PerAgent<double>>();
  m.safety_stops = j.at("safety_stops").get<std::size_t>();
  m.replans = j.at("replans").get<std::size_t>();
  m.timed_out = j.at("timed_out").get<bool>();
  return m;
}

struct TrialResult {
  TaskSpec task;
  TrialMetrics metrics;
  std::vector<json> log;

  /// JSON-lines form of the log, one record per line.
  std::string jsonl() const {
    std::string out;
    for (const json& r : log) {
      out += r.dump();
      out += '\n';
    }
    return out;
  }

  double robot_time(int robot_agent) const { return metrics.agent_time[robot_agent]; }
};

inline json seat_record(const SeatPlan& p, bool with_costs) {
  json j{{"agent", p.agent + 1}, {"policy", to_string(p.policy)}, {"action", p.decision.action},
         {"duration", p.chosen.duration}, {"static", p.chosen.is_static()}};
  if (!p.game) return j;
  j["wait_cost"] = p.game->wait_cost;
  j["equilibria"] = p.equilibria;
  j["planning_failed"] = p.planning_failed;
  j["profile"] = p.decision.profile ? json{p.decision.profile->i1, p.decision.profile->i2} : json(nullptr);
  if (!p.decision.p_norm.empty()) j["p_n"] = p.decision.p_norm;
  if (const auto& sel = p.decision.selection) {
    j["p_alpha"] = sel->p_alpha;
    j["belief"] = sel->belief;
    j["chosen"] = sel->chosen;
  }
  if (with_costs) j["costs"] = p.game->costs;
  return j;
}

inline json trial_header(const TrialConfig& cfg, const TaskSpec& task) {
  return json{{"type", "trial"},
              {"v", 1},
              {"seed", cfg.seed},
              {"robot", to_string(cfg.robot)},
              {"human", to_string(cfg.human)},
              {"robot_agent", cfg.robot_agent + 1},
              {"k", cfg.loop.k},
              {"replan_interval", cfg.loop.replan_interval},
              {"dt_exec", cfg.loop.dt_exec},
              {"dt_cost", cfg.loop.dt_cost},
              {"contact_probe", cfg.loop.contact_probe},
              {"lambda_n", cfg.loop.policy.norm.lambda_n},
              {"lambda_alpha", cfg.loop.policy.personality.lambda_alpha},
              {"max_trial_time", cfg.max_trial_time},
              {"task", task}};
}

inline json trial_header(const TrialConfig& cfg, const TaskSpec& task, const WorldState& start) {
  json j = trial_header(cfg, task);
  if (cfg.start) j["start"] = start;
  return j;
}

/// Replan, partially execute, record, repeat until both agents are Done or the
/// trial times out. Safety-stop holds are excluded from task times.
inline TrialResult run_trial(const TrialConfig& cfg) {
  cfg.validate();
  TrialResult result;
  result.task = cfg.task ? *cfg.task : generate_task(cfg.seed, cfg.workspace);
  const TaskSpec& task = result.task;
  const LoopParams& loop = cfg.loop;
  const double dt = loop.dt_exec;

  PerAgent<PlanningAgent> agents{PlanningAgent(0, cfg.policy_of(0), loop, cfg.seed),
                                 PlanningAgent(1, cfg.policy_of(1), loop, cfg.seed)};
  WorldState world = cfg.start ? *cfg.start : initial_world(task);
  InteractionHistory history;
  TaskClock task_clock;
  task_clock.on_step(world);
  TrialMetrics& m = result.metrics;
  result.log.push_back(trial_header(cfg, task, world));

  auto out_of_time = [&] { return world.clock >= cfg.max_trial_time - 1e-9; };
  std::size_t replan = 0;
  while (!world.all_done() && !out_of_time()) {
    const PerAgent<SeatPlan> plans{agents[0].replan(world, task, history, replan),
                                   agents[1].replan(world, task, history, replan)};
    result.log.push_back({{"type", "replan"},
                          {"index", replan},
                          {"t", world.clock},
                          {"seats", {seat_record(plans[0], cfg.log_cost_matrices),
                                     seat_record(plans[1], cfg.log_cost_matrices)}}});
    ++m.replans;
    ++replan;

    for (std::size_t step = 0; step < loop.steps_per_segment(); ++step) {
      if (world.all_done() || out_of_time()) break;
      const double local = static_cast<double>(step + 1) * dt;
      PerAgent<JointVelocity> vel{};
      for (int i = 0; i < kNumAgents; ++i)
        if (!world.done(i))
          vel[i] = tracking_velocity(world.joints[i], resample_at(plans[i].chosen, local), dt,
                                     task.workspace.arms[i].v_max);

      history.append(world.clock, world.joints);
      const StepOutcome outcome = guarded_step(world, task, vel, dt);
      const PerAgent<Phase> before = world.phase;
      if (outcome.safety_stop) {
        task_clock.on_stop(world, dt);
        ++m.safety_stops;
        result.log.push_back({{"type", "safety_stop"}, {"t", world.clock}, {"joints", world.joints}});
      }
      world = outcome.world;
      task_clock.on_step(world);
      bool phase_changed = false;
      for (int i = 0; i < kNumAgents; ++i) {
        if (world.phase[i] == before[i]) continue;
        phase_changed = true;
        result.log.push_back(
            {{"type", "phase"}, {"t", world.clock}, {"agent", i + 1}, {"phase", to_string(world.phase[i])}});
      }
      if (cfg.log_states)
        result.log.push_back({{"type", "step"},
                              {"t", world.clock},
                              {"joints", world.joints},
                              {"stop", outcome.safety_stop}});
      if (outcome.safety_stop) break;
      if (phase_changed && loop.replan_on_phase_change) break;
    }
  }

  m.timed_out = !world.all_done();
  for (int i = 0; i < kNumAgents; ++i) m.agent_time[i] = task_clock.agent_time(i, world.clock);
  m.total_task_time = std::max(m.agent_time[0], m.agent_time[1]);
  result.log.push_back({{"type", "metrics"}, {"t", world.clock}, {"metrics", metrics_to_json(m)}});
  return result;
}

}  // namespace parplay
