#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "parplay/sim/geometry.hpp"

namespace parplay {

/// Planar two-link arm. Links are capsules of radius `link_radius`.
struct ArmModel {
  Vec2 base;
  double l1 = 0.5;
  double l2 = 0.5;
  double link_radius = 0.05;
  double v_max = 1.5;  // rad/s, per joint

  void validate() const {
    if (!(l1 > 0.0 && l2 > 0.0)) throw std::invalid_argument("ArmModel: link lengths must be > 0");
    if (!(link_radius > 0.0)) throw std::invalid_argument("ArmModel: link_radius must be > 0");
    if (!(v_max > 0.0)) throw std::invalid_argument("ArmModel: v_max must be > 0");
  }

  double reach() const { return l1 + l2; }
  double inner_reach() const { return std::abs(l1 - l2); }
};

struct ArmPose {
  Vec2 elbow;
  Vec2 end_effector;
};

inline ArmPose forward_kinematics(const ArmModel& arm, JointState q) {
  const Vec2 elbow = arm.base + Vec2{arm.l1 * std::cos(q.q1), arm.l1 * std::sin(q.q1)};
  const double a = q.q1 + q.q2;
  return {elbow, elbow + Vec2{arm.l2 * std::cos(a), arm.l2 * std::sin(a)}};
}

inline Vec2 end_effector(const ArmModel& arm, JointState q) {
  return forward_kinematics(arm, q).end_effector;
}

/// d(end_effector)/d(q), column-major: {d/dq1, d/dq2}.
inline std::array<Vec2, 2> jacobian(const ArmModel& arm, JointState q) {
  const double a = q.q1 + q.q2;
  const Vec2 j2{-arm.l2 * std::sin(a), arm.l2 * std::cos(a)};
  const Vec2 j1{-arm.l1 * std::sin(q.q1) + j2.x, arm.l1 * std::cos(q.q1) + j2.y};
  return {j1, j2};
}

inline bool reachable(const ArmModel& arm, Vec2 target) {
  const double d = distance(target, arm.base);
  return d <= arm.reach() && d >= arm.inner_reach();
}

/// Both closed-form IK branches for an end-effector target; nullopt when out of reach.
inline std::optional<std::array<JointState, 2>> inverse_kinematics(const ArmModel& arm, Vec2 target) {
  const Vec2 p = target - arm.base;
  const double d2 = dot(p, p);
  const double c2 = (d2 - arm.l1 * arm.l1 - arm.l2 * arm.l2) / (2.0 * arm.l1 * arm.l2);
  if (c2 < -1.0 - 1e-12 || c2 > 1.0 + 1e-12) return std::nullopt;
  const double q2 = std::acos(std::clamp(c2, -1.0, 1.0));
  const double heading = std::atan2(p.y, p.x);
  std::array<JointState, 2> out{};
  for (int i = 0; i < 2; ++i) {
    const double s = i == 0 ? q2 : -q2;
    const double q1 = heading - std::atan2(arm.l2 * std::sin(s), arm.l1 + arm.l2 * std::cos(s));
    out[i] = normalized({q1, s});
  }
  return out;
}

/// Minimum surface-to-axis clearance between the link segments of two arms.
inline double arm_distance(const ArmModel& a, JointState qa, const ArmModel& b, JointState qb) {
  const ArmPose pa = forward_kinematics(a, qa);
  const ArmPose pb = forward_kinematics(b, qb);
  const std::array<std::array<Vec2, 2>, 2> sa{{{a.base, pa.elbow}, {pa.elbow, pa.end_effector}}};
  const std::array<std::array<Vec2, 2>, 2> sb{{{b.base, pb.elbow}, {pb.elbow, pb.end_effector}}};
  double best = INFINITY;
  for (const auto& s : sa)
    for (const auto& t : sb) best = std::min(best, segment_distance(s[0], s[1], t[0], t[1]));
  return best;
}

inline bool arms_collide(const ArmModel& a, JointState qa, const ArmModel& b, JointState qb) {
  return arm_distance(a, qa, b, qb) < a.link_radius + b.link_radius;
}

}  // namespace parplay
