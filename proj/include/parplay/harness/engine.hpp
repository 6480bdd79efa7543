#pragma once

// Pieces of the replan/execute loop shared by the batch harness and the live
// play service: per-seat planning, velocity tracking, and safety-stop stepping.

#include <cmath>
#include <cstdint>
#include <optional>

#include "parplay/agents/policies.hpp"
#include "parplay/game/game.hpp"
#include "parplay/plan/action_set.hpp"
#include "parplay/sim/random.hpp"
#include "parplay/sim/world.hpp"

namespace parplay {

struct LoopParams {
  std::size_t k = 8;
  double replan_interval = 0.8;
  double dt_exec = 0.1;
  double dt_cost = 0.8;
  PlannerParams planner;
  PolicyParams policy;
  /// Replan as soon as either agent changes phase instead of idling out the segment.
  bool replan_on_phase_change = true;
  /// Also check the first execution step when costing profiles, so a game built
  /// right after a safety stop sees the contact that caused it. Off: coarse grid only.
  bool contact_probe = false;

  std::size_t steps_per_segment() const { return static_cast<std::size_t>(std::llround(replan_interval / dt_exec)); }

  void validate() const {
    if (k < 2) throw std::invalid_argument("LoopParams: k must be >= 2");
    if (!(dt_exec > 0.0) || !(dt_cost > 0.0)) throw std::invalid_argument("LoopParams: time steps must be > 0");
    if (!(dt_exec < dt_cost)) throw std::invalid_argument("LoopParams: dt_exec must be < dt_cost");
    const double ratio = replan_interval / dt_exec;
    if (!(replan_interval > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9)
      throw std::invalid_argument("LoopParams: replan_interval must be a positive multiple of dt_exec");
    policy.norm.validate();
    policy.personality.validate();
  }
};

/// One seat's view after a replan: its own game, equilibria and decision.
struct SeatPlan {
  int agent = 0;
  PolicyKind policy = PolicyKind::Idle;
  std::optional<GameSpec> game;
  EquilibriumSet equilibria;
  AgentDecision decision;
  Trajectory chosen;
  PerAgent<bool> planning_failed{false, false};
};

/// Seed of the action set that `seat` samples for `agent` at replan `replan`.
inline std::uint64_t action_set_seed(std::uint64_t trial_seed, std::size_t replan, int seat, int agent) {
  return derive_seed({trial_seed, static_cast<std::uint64_t>(replan), static_cast<std::uint64_t>(seat),
                      static_cast<std::uint64_t>(agent)});
}

/// A policy-driven agent. Each seat samples both agents' action sets on its own
/// seed stream, so the two seats reason about different (but similar) games.
class PlanningAgent {
 public:
  PlanningAgent(int agent, PolicyKind policy, LoopParams params, std::uint64_t trial_seed)
      : agent_(agent), policy_(policy), params_(std::move(params)), seed_(trial_seed) {}

  int agent() const { return agent_; }
  PolicyKind policy() const { return policy_; }
  const std::optional<InitialEquilibria>& initial() const { return initial_; }

  SeatPlan replan(const WorldState& world, const TaskSpec& task, const InteractionHistory& history,
                  std::size_t replan_index) {
    SeatPlan out;
    out.agent = agent_;
    out.policy = policy_;
    if (policy_ == PolicyKind::Idle || policy_ == PolicyKind::External) {
      out.chosen = static_trajectory(world.joints[agent_]);
      return out;
    }

    PerAgent<ActionSet> sets;
    for (int a = 0; a < kNumAgents; ++a) {
      try {
        sets[a] = sample_action_set(world, task, a, params_.k, action_set_seed(seed_, replan_index, agent_, a),
                                    params_.planner);
      } catch (const PlanningFailure&) {
        out.planning_failed[a] = true;
        sets[a] = ActionSet{a, std::vector<Trajectory>(params_.k, static_trajectory(world.joints[a]))};
      }
    }
    GameSpec game = build_game(world, task, std::move(sets), params_.dt_cost, params_.replan_interval,
                               params_.contact_probe ? params_.dt_exec : 0.0);
    out.equilibria = solve_equilibria(game.costs);
    if (!initial_) initial_ = InitialEquilibria::from_game(game, out.equilibria);

    AgentContext ctx;
    ctx.agent = agent_;
    ctx.game = &game;
    ctx.equilibria = &out.equilibria;
    ctx.history = &history;
    ctx.initial = &*initial_;
    ctx.params = params_.policy;
    ctx.excluded = {world.done(0), world.done(1)};
    out.decision = decide(policy_, ctx);
    out.chosen = game.action(agent_, out.decision.action);
    out.game = std::move(game);
    return out;
  }

 private:
  int agent_;
  PolicyKind policy_;
  LoopParams params_;
  std::uint64_t seed_;
  std::optional<InitialEquilibria> initial_;
};

/// Joint velocity that moves `current` onto `target` in one step of dt, clamped to v_max.
inline JointVelocity tracking_velocity(JointState current, JointState target, double dt, double v_max) {
  return {std::clamp(angle_diff(target.q1, current.q1) / dt, -v_max, v_max),
          std::clamp(angle_diff(target.q2, current.q2) / dt, -v_max, v_max)};
}

struct StepOutcome {
  WorldState world;
  bool safety_stop = false;
};

/// Advances one execution step unless the resulting poses would interpenetrate,
/// in which case both agents hold for the step.
inline StepOutcome guarded_step(const WorldState& world, const TaskSpec& task, const PerAgent<JointVelocity>& velocity,
                                double dt) {
  WorldState next = step_world(world, task, velocity, dt);
  const auto& arms = task.workspace.arms;
  if (arms_collide(arms[0], next.joints[0], arms[1], next.joints[1]))
    return {step_world(world, task, {JointVelocity{}, JointVelocity{}}, dt), true};
  return {std::move(next), false};
}

/// Per-agent task time with safety-stop holds excluded.
struct TaskClock {
  PerAgent<double> stop_time{0.0, 0.0};
  PerAgent<std::optional<double>> finished;

  void on_stop(const WorldState& before, double dt) {
    for (int i = 0; i < kNumAgents; ++i)
      if (!before.done(i)) stop_time[i] += dt;
  }

  void on_step(const WorldState& after) {
    for (int i = 0; i < kNumAgents; ++i)
      if (after.done(i) && !finished[i]) finished[i] = after.clock - stop_time[i];
  }

  double agent_time(int i, double clock) const { return finished[i] ? *finished[i] : clock - stop_time[i]; }
};

}  // namespace parplay
