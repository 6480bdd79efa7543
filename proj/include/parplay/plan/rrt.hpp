#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "parplay/plan/trajectory.hpp"
#include "parplay/sim/arm.hpp"
#include "parplay/sim/random.hpp"
#include "parplay/sim/world.hpp"

namespace parplay {

class PlanningFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RrtParams {
  double step = 0.1;        // rad
  double goal_bias = 0.1;
  int max_iterations = 5000;
};

namespace detail {

/// Uniform bucket grid over the joint box for nearest-neighbour queries.
class JointGrid {
 public:
  static constexpr int kCells = 32;

  void insert(int id, JointState q) { cells_[index(cell(q.q1), cell(q.q2))].push_back(id); }

  template <typename DistFn>
  int nearest(JointState q, DistFn&& dist) const {
    const int cx = cell(q.q1);
    const int cy = cell(q.q2);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int r = 0; r < kCells; ++r) {
      for (int x = cx - r; x <= cx + r; ++x) {
        for (int y = cy - r; y <= cy + r; ++y) {
          if (std::max(std::abs(x - cx), std::abs(y - cy)) != r) continue;
          if (x < 0 || y < 0 || x >= kCells || y >= kCells) continue;
          for (int id : cells_[index(x, y)]) {
            const double d = dist(id);
            if (d < best_d || (d == best_d && id < best)) {
              best_d = d;
              best = id;
            }
          }
        }
      }
      // Every unvisited node lies at least r cell widths away.
      if (best >= 0 && best_d <= r * kWidth) break;
    }
    return best;
  }

 private:
  static constexpr double kWidth = kTwoPi / kCells;
  static int cell(double a) { return std::clamp(static_cast<int>((a + kPi) / kWidth), 0, kCells - 1); }
  static int index(int x, int y) { return x * kCells + y; }

  std::vector<std::vector<int>> cells_ = std::vector<std::vector<int>>(kCells * kCells);
};

inline double joint_distance(JointState a, JointState b) { return std::hypot(a.q1 - b.q1, a.q2 - b.q2); }

}  // namespace detail

/// Goal-biased RRT in the joint box [-pi, pi]^2. Only workspace bounds are obstacles.
/// Terminates at the first node whose end-effector is within `goal_radius` of `target`.
inline JointPath rrt_plan(JointState start, Vec2 target, const ArmModel& arm, const Workspace& workspace,
                          double goal_radius, std::uint64_t seed, const RrtParams& params = {}) {
  if (!reachable(arm, target)) throw std::invalid_argument("rrt_plan: target outside reachable annulus");
  auto at_goal = [&](JointState q) { return distance(end_effector(arm, q), target) <= goal_radius; };
  auto in_bounds = [&](JointState q) {
    const ArmPose p = forward_kinematics(arm, q);
    return workspace.inside(p.elbow) && workspace.inside(p.end_effector);
  };
  if (at_goal(start)) return {start};

  const auto goals = inverse_kinematics(arm, target);
  Rng rng(seed);
  std::vector<JointState> nodes{start};
  std::vector<int> parent{-1};
  detail::JointGrid grid;
  grid.insert(0, start);

  for (int it = 0; it < params.max_iterations; ++it) {
    JointState sample;
    if (goals && rng.uniform() < params.goal_bias) {
      sample = (*goals)[rng.uniform() < 0.5 ? 0 : 1];
    } else {
      sample = {rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
    }
    const int near = grid.nearest(sample, [&](int id) { return detail::joint_distance(nodes[id], sample); });
    const JointState from = nodes[near];
    const double d = detail::joint_distance(from, sample);
    if (d <= 0.0) continue;
    const double u = std::min(1.0, params.step / d);
    const JointState q{from.q1 + u * (sample.q1 - from.q1), from.q2 + u * (sample.q2 - from.q2)};
    if (!in_bounds(q)) continue;

    const int id = static_cast<int>(nodes.size());
    nodes.push_back(q);
    parent.push_back(near);
    grid.insert(id, q);
    if (at_goal(q)) {
      JointPath path;
      for (int n = id; n >= 0; n = parent[n]) path.push_back(nodes[n]);
      return {path.rbegin(), path.rend()};
    }
  }
  throw PlanningFailure("rrt_plan: goal not reached within max_iterations");
}

}  // namespace parplay
