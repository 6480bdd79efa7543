#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parplay/game/cost_matrix.hpp"
#include "parplay/game/nash.hpp"
#include "parplay/plan/action_set.hpp"
#include "parplay/sim/world.hpp"

namespace parplay {

struct GameSpec {
  PerAgent<ActionSet> action_sets;
  CostMatrix costs;
  double wait_cost = 0.0;

  const Trajectory& action(int agent, std::size_t index) const { return action_sets[agent][index]; }
};

/// Cost of holding still for an unfinished agent: longer than any sampled plan in
/// the game by one replan interval, so waiting only wins when every move collides.
inline double wait_cost(const PerAgent<ActionSet>& sets, double replan_interval) {
  double longest = 0.0;
  for (const ActionSet& s : sets)
    for (const Trajectory& t : s.actions)
      if (!t.is_static()) longest = std::max(longest, t.duration);
  return longest + replan_interval;
}

inline double own_cost(const Trajectory& traj, bool done, double wait) {
  if (done) return 0.0;
  return traj.is_static() ? wait : traj.duration;
}

/// Rolls both trajectories forward on a coarse dt_cost grid (including t = 0 and
/// the end of the longer one). Any contact yields infinite cost for both agents.
/// A positive `probe` adds one extra check at that time, typically the first
/// execution step.
inline CostPair simulate_profile(const Trajectory& traj1, const Trajectory& traj2, const WorldState& world,
                                 const TaskSpec& task, double dt_cost, double wait, double probe = 0.0) {
  if (!(dt_cost > 0.0)) throw std::invalid_argument("simulate_profile: dt_cost must be > 0");
  const ArmModel& a1 = task.workspace.arms[0];
  const ArmModel& a2 = task.workspace.arms[1];
  const double horizon = std::max(traj1.duration, traj2.duration);
  if (probe > 0.0) {
    const double t = std::min(probe, horizon);
    if (arms_collide(a1, resample_at(traj1, t), a2, resample_at(traj2, t))) return kCollisionCost;
  }
  for (std::size_t n = 0;; ++n) {
    const double t = std::min(static_cast<double>(n) * dt_cost, horizon);
    if (arms_collide(a1, resample_at(traj1, t), a2, resample_at(traj2, t))) return kCollisionCost;
    if (t >= horizon) break;
  }
  return {own_cost(traj1, world.done(0), wait), own_cost(traj2, world.done(1), wait)};
}

inline GameSpec build_game(const WorldState& world, const TaskSpec& task, PerAgent<ActionSet> sets,
                           double dt_cost, double replan_interval, double probe = 0.0) {
  if (sets[0].agent != 0 || sets[1].agent != 1) throw std::invalid_argument("build_game: action sets out of seat order");
  GameSpec game;
  game.wait_cost = wait_cost(sets, replan_interval);
  game.costs = CostMatrix(sets[0].size(), sets[1].size());
  for (std::size_t i = 0; i < sets[0].size(); ++i)
    for (std::size_t j = 0; j < sets[1].size(); ++j)
      game.costs.at(i, j) = simulate_profile(sets[0][i], sets[1][j], world, task, dt_cost, game.wait_cost, probe);
  game.action_sets = std::move(sets);
  return game;
}

}  // namespace parplay
