#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "parplay/sim/geometry.hpp"

namespace parplay {

using JointPath = std::vector<JointState>;

struct TimedState {
  double t = 0.0;
  JointState q;

  friend bool operator==(const TimedState&, const TimedState&) = default;
};

enum class TrajectoryKind { Sampled, Static };

/// Time-stamped joint-space motion. Times start at 0 and strictly increase.
struct Trajectory {
  std::vector<TimedState> states;
  double duration = 0.0;
  TrajectoryKind kind = TrajectoryKind::Sampled;

  bool is_static() const { return kind == TrajectoryKind::Static; }
  JointState start() const { return states.front().q; }
  JointState end() const { return states.back().q; }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

inline Trajectory static_trajectory(JointState q) {
  return Trajectory{{TimedState{0.0, q}}, 0.0, TrajectoryKind::Static};
}

/// Constant-speed timing: across each waypoint segment the most-displaced joint
/// moves at v_max. The result is resampled on a dt grid with the exact end time appended.
inline Trajectory time_parameterize(const JointPath& path, double v_max, double dt) {
  if (path.empty()) throw std::invalid_argument("time_parameterize: empty path");
  if (!(v_max > 0.0) || !(dt > 0.0)) throw std::invalid_argument("time_parameterize: v_max and dt must be > 0");

  std::vector<double> knots{0.0};
  JointPath pts{path.front()};
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double seg = std::max(std::abs(path[i].q1 - pts.back().q1), std::abs(path[i].q2 - pts.back().q2)) / v_max;
    if (seg <= 0.0) continue;
    knots.push_back(knots.back() + seg);
    pts.push_back(path[i]);
  }

  Trajectory out;
  out.kind = TrajectoryKind::Sampled;
  out.duration = knots.back();
  if (pts.size() == 1) {
    out.states.push_back({0.0, pts.front()});
    return out;
  }

  std::size_t seg = 0;
  auto at = [&](double t) {
    while (seg + 2 < knots.size() && knots[seg + 1] < t) ++seg;
    const double span = knots[seg + 1] - knots[seg];
    const double u = std::clamp((t - knots[seg]) / span, 0.0, 1.0);
    const JointState& a = pts[seg];
    const JointState& b = pts[seg + 1];
    return JointState{a.q1 + u * (b.q1 - a.q1), a.q2 + u * (b.q2 - a.q2)};
  };
  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * dt;
    if (t >= out.duration - 1e-9) break;
    out.states.push_back({t, i == 0 ? pts.front() : at(t)});
  }
  out.states.push_back({out.duration, pts.back()});
  return out;
}

/// Piecewise-linear interpolation; holds the final pose after the trajectory ends.
inline JointState resample_at(const Trajectory& traj, double t) {
  if (traj.states.empty()) throw std::invalid_argument("resample_at: empty trajectory");
  if (t <= traj.states.front().t) return traj.states.front().q;
  if (t >= traj.states.back().t) return traj.states.back().q;
  auto hi = std::upper_bound(traj.states.begin(), traj.states.end(), t,
                             [](double v, const TimedState& s) { return v < s.t; });
  auto lo = std::prev(hi);
  const double u = (t - lo->t) / (hi->t - lo->t);
  return JointState{lo->q.q1 + u * (hi->q.q1 - lo->q.q1), lo->q.q2 + u * (hi->q.q2 - lo->q.q2)};
}

}  // namespace parplay
