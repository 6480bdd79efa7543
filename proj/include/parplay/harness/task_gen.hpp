#pragma once

#include <cstdint>

#include "parplay/sim/random.hpp"
#include "parplay/sim/world.hpp"

namespace parplay {

/// Objects are kept this far inside both arms' reach so they can be grasped.
inline constexpr double kReachMargin = 0.05;

inline bool in_shared_reach(const Workspace& ws, Vec2 p, double margin = kReachMargin) {
  if (!ws.inside(p)) return false;
  for (const ArmModel& arm : ws.arms) {
    const double d = distance(p, arm.base);
    if (d > arm.reach() - margin || d < arm.inner_reach() + margin) return false;
  }
  return true;
}

/// Objects uniform over the region both arms can reach; destinations stay at the
/// per-agent defaults on opposite sides. Objects are resampled until at least two
/// link radii apart.
inline TaskSpec generate_task(std::uint64_t seed, const Workspace& workspace = {}) {
  TaskSpec task;
  task.workspace = workspace;
  task.rng_seed = seed;
  Rng rng(derive_seed({seed, 0x7a5cu}));
  const double min_gap = workspace.arms[0].link_radius + workspace.arms[1].link_radius;
  auto draw = [&] {
    for (;;) {
      const Vec2 p{rng.uniform(-workspace.bound, workspace.bound), rng.uniform(-workspace.bound, workspace.bound)};
      if (in_shared_reach(workspace, p)) return p;
    }
  };
  do {
    task.objects = {draw(), draw()};
  } while (distance(task.objects[0], task.objects[1]) < min_gap);
  return task;
}

}  // namespace parplay
