#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "parplay/plan/rrt.hpp"
#include "parplay/plan/trajectory.hpp"
#include "parplay/sim/random.hpp"
#include "parplay/sim/world.hpp"

namespace parplay {

struct PlannerParams {
  RrtParams rrt;
  double dt = 0.1;  // trajectory resampling grid
};

/// k candidate trajectories for one agent. Index 0 is always the Static plan.
struct ActionSet {
  int agent = 0;
  std::vector<Trajectory> actions;

  std::size_t size() const { return actions.size(); }
  const Trajectory& operator[](std::size_t i) const { return actions[i]; }

  friend bool operator==(const ActionSet&, const ActionSet&) = default;
};

inline constexpr std::size_t kStaticAction = 0;

/// Seed for the `sample`-th plan of a set drawn with `set_seed`.
inline std::uint64_t plan_seed(std::uint64_t set_seed, std::size_t sample) {
  return derive_seed({set_seed, static_cast<std::uint64_t>(sample)});
}

inline ActionSet sample_action_set(const WorldState& world, const TaskSpec& task, int agent, std::size_t k,
                                   std::uint64_t seed, const PlannerParams& params = {}) {
  if (k < 2) throw std::invalid_argument("sample_action_set: k must be >= 2");
  const JointState start = world.joints[agent];
  ActionSet set{agent, {}};
  set.actions.reserve(k);
  set.actions.push_back(static_trajectory(start));

  const auto target = phase_target(world, task, agent);
  if (!target) {
    set.actions.resize(k, static_trajectory(start));
    return set;
  }

  const ArmModel& arm = task.workspace.arms[agent];
  std::vector<Trajectory> plans;
  for (std::size_t s = 0; s + 1 < k; ++s) {
    try {
      const JointPath path = rrt_plan(start, *target, arm, task.workspace, task.grasp_radius, plan_seed(seed, s), params.rrt);
      plans.push_back(time_parameterize(path, arm.v_max, params.dt));
    } catch (const PlanningFailure&) {
    }
  }
  if (plans.empty()) throw PlanningFailure("sample_action_set: every sampled plan failed");
  for (std::size_t s = 0; s + 1 < k; ++s) set.actions.push_back(plans[s % plans.size()]);
  return set;
}

}  // namespace parplay
