#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>

#include "parplay/sim/arm.hpp"
#include "parplay/sim/geometry.hpp"

namespace parplay {

inline constexpr int kNumAgents = 2;

/// Agents are indexed 0 and 1 in code; serialized forms use 1 and 2.
constexpr int other(int agent) { return 1 - agent; }

template <typename T>
using PerAgent = std::array<T, kNumAgents>;

struct Region {
  Vec2 center;
  double radius = 0.1;

  bool contains(Vec2 p) const { return distance(p, center) <= radius; }
};

/// Arm geometry, rest poses, and the square workspace bound [-bound, bound]^2.
struct Workspace {
  PerAgent<ArmModel> arms{ArmModel{{-0.8, 0.0}}, ArmModel{{0.8, 0.0}}};
  PerAgent<JointState> rest{JointState{kPi / 2, kPi / 2}, JointState{kPi / 2, -kPi / 2}};
  double bound = 1.5;

  bool inside(Vec2 p) const { return std::abs(p.x) <= bound && std::abs(p.y) <= bound; }

  /// Both link endpoints within bounds; links are straight so this covers the segments.
  bool pose_inside(int agent, JointState q) const {
    const ArmPose p = forward_kinematics(arms[agent], q);
    return inside(p.elbow) && inside(p.end_effector);
  }

  void validate() const {
    for (const auto& a : arms) a.validate();
    if (!(bound > 0.0)) throw std::invalid_argument("Workspace: bound must be > 0");
  }
};

struct TaskSpec {
  PerAgent<Vec2> objects;
  PerAgent<Region> destinations{Region{{-1.2, -0.5}, 0.1}, Region{{1.2, -0.5}, 0.1}};
  double grasp_radius = 0.05;
  std::uint64_t rng_seed = 0;
  Workspace workspace;

  void validate() const {
    workspace.validate();
    if (!(grasp_radius > 0.0)) throw std::invalid_argument("TaskSpec: grasp_radius must be > 0");
    for (int i = 0; i < kNumAgents; ++i) {
      if (!workspace.inside(objects[i])) throw std::invalid_argument("TaskSpec: object outside workspace");
      if (!workspace.inside(destinations[i].center))
        throw std::invalid_argument("TaskSpec: destination outside workspace");
      if (!(destinations[i].radius > 0.0)) throw std::invalid_argument("TaskSpec: destination radius must be > 0");
    }
  }
};

enum class Phase { ReachingObject, Carrying, Done };

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::ReachingObject: return "reaching_object";
    case Phase::Carrying: return "carrying";
    case Phase::Done: return "done";
  }
  return "?";
}

inline Phase phase_from_string(std::string_view s) {
  if (s == "reaching_object") return Phase::ReachingObject;
  if (s == "carrying") return Phase::Carrying;
  if (s == "done") return Phase::Done;
  throw std::invalid_argument("unknown phase");
}

struct WorldState {
  PerAgent<JointState> joints;
  PerAgent<Phase> phase{Phase::ReachingObject, Phase::ReachingObject};
  PerAgent<bool> grasped{false, false};
  PerAgent<Vec2> object_positions;
  double clock = 0.0;

  bool done(int agent) const { return phase[agent] == Phase::Done; }
  bool all_done() const { return done(0) && done(1); }

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

inline WorldState initial_world(const TaskSpec& task) {
  WorldState w;
  w.joints = {normalized(task.workspace.rest[0]), normalized(task.workspace.rest[1])};
  w.object_positions = task.objects;
  return w;
}

/// Workspace point the agent is currently heading for; nullopt once Done.
inline std::optional<Vec2> phase_target(const WorldState& w, const TaskSpec& task, int agent) {
  switch (w.phase[agent]) {
    case Phase::ReachingObject: return task.objects[agent];
    case Phase::Carrying: return task.destinations[agent].center;
    case Phase::Done: return std::nullopt;
  }
  return std::nullopt;
}

using JointVelocity = JointState;

/// Euler-integrates joints, then applies at most one phase transition per agent.
inline WorldState step_world(const WorldState& world, const TaskSpec& task,
                             const PerAgent<JointVelocity>& velocity, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_world: dt must be > 0");
  WorldState next = world;
  for (int i = 0; i < kNumAgents; ++i) {
    const ArmModel& arm = task.workspace.arms[i];
    const double limit = arm.v_max * (1.0 + 1e-9);
    JointVelocity v = velocity[i];
    if (!std::isfinite(v.q1) || !std::isfinite(v.q2) || std::abs(v.q1) > limit || std::abs(v.q2) > limit)
      throw std::invalid_argument("step_world: joint velocity exceeds v_max");
    v.q1 = std::clamp(v.q1, -arm.v_max, arm.v_max);
    v.q2 = std::clamp(v.q2, -arm.v_max, arm.v_max);
    if (world.done(i)) v = {};
    next.joints[i] = normalized({world.joints[i].q1 + v.q1 * dt, world.joints[i].q2 + v.q2 * dt});

    const Vec2 ee = end_effector(arm, next.joints[i]);
    switch (world.phase[i]) {
      case Phase::ReachingObject:
        if (distance(ee, task.objects[i]) <= task.grasp_radius) {
          next.phase[i] = Phase::Carrying;
          next.grasped[i] = true;
        }
        break;
      case Phase::Carrying:
        if (task.destinations[i].contains(ee)) {
          next.phase[i] = Phase::Done;
          next.grasped[i] = false;
        }
        break;
      case Phase::Done: break;
    }
    if (next.grasped[i] || (world.grasped[i] && next.phase[i] == Phase::Done)) next.object_positions[i] = ee;
  }
  next.clock = world.clock + dt;
  return next;
}

}  // namespace parplay
