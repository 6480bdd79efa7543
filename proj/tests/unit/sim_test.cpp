#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "parplay/sim/arm.hpp"
#include "parplay/sim/random.hpp"
#include "parplay/sim/world.hpp"

namespace parplay {
namespace {

// Rotation-matrix composition, written independently of forward_kinematics.
struct Mat2 {
  double a, b, c, d;
  Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 mul(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
};
Mat2 rot(double t) { return {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}; }

std::pair<Vec2, Vec2> fk_oracle(const ArmModel& arm, JointState q) {
  const Mat2 r1 = rot(q.q1);
  const Mat2 r12 = r1.mul(rot(q.q2));
  const Vec2 elbow = arm.base + r1.apply({arm.l1, 0.0});
  return {elbow, elbow + r12.apply({arm.l2, 0.0})};
}

double point_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  const double u = len2 > 0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return distance(p, a + u * ab);
}

// Dense sampling of arm A every millimetre against arm B's exact segments.
double sampled_arm_distance(const ArmModel& a, JointState qa, const ArmModel& b, JointState qb) {
  const ArmPose pa = forward_kinematics(a, qa);
  const ArmPose pb = forward_kinematics(b, qb);
  const Vec2 segs_a[2][2] = {{a.base, pa.elbow}, {pa.elbow, pa.end_effector}};
  double best = 1e300;
  for (const auto& s : segs_a) {
    const double len = distance(s[0], s[1]);
    const int n = static_cast<int>(std::ceil(len / 1e-3));
    for (int i = 0; i <= n; ++i) {
      const Vec2 p = s[0] + (static_cast<double>(i) / n) * (s[1] - s[0]);
      best = std::min({best, point_segment(p, b.base, pb.elbow), point_segment(p, pb.elbow, pb.end_effector)});
    }
  }
  return best;
}

TEST(ForwardKinematics, ZeroAngles) {
  const ArmModel arm{{0, 0}};
  const ArmPose p = forward_kinematics(arm, {0, 0});
  EXPECT_NEAR(p.elbow.x, 0.5, 1e-15);
  EXPECT_NEAR(p.elbow.y, 0.0, 1e-15);
  EXPECT_NEAR(p.end_effector.x, 1.0, 1e-15);
  EXPECT_NEAR(p.end_effector.y, 0.0, 1e-15);
}

TEST(ForwardKinematics, QuarterTurn) {
  const ArmModel arm{{0, 0}};
  const ArmPose p = forward_kinematics(arm, {kPi / 2, 0});
  EXPECT_NEAR(p.elbow.x, 0.0, 1e-15);
  EXPECT_NEAR(p.elbow.y, 0.5, 1e-15);
  EXPECT_NEAR(p.end_effector.x, 0.0, 1e-15);
  EXPECT_NEAR(p.end_effector.y, 1.0, 1e-15);
}

TEST(ForwardKinematics, MatchesRotationOracle) {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    ArmModel arm{{rng.uniform(-1, 1), rng.uniform(-1, 1)}, rng.uniform(0.1, 1), rng.uniform(0.1, 1)};
    const JointState q{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
    const ArmPose p = forward_kinematics(arm, q);
    const auto [elbow, ee] = fk_oracle(arm, q);
    EXPECT_NEAR(p.elbow.x, elbow.x, 1e-12);
    EXPECT_NEAR(p.elbow.y, elbow.y, 1e-12);
    EXPECT_NEAR(p.end_effector.x, ee.x, 1e-12);
    EXPECT_NEAR(p.end_effector.y, ee.y, 1e-12);
  }
}

TEST(ForwardKinematics, InvariantUnderFullTurns) {
  Rng rng(12);
  const ArmModel arm{{0.3, -0.2}};
  for (int i = 0; i < 100; ++i) {
    const JointState q{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
    const ArmPose a = forward_kinematics(arm, q);
    const ArmPose b = forward_kinematics(arm, {q.q1 + kTwoPi, q.q2 - kTwoPi});
    EXPECT_NEAR(a.end_effector.x, b.end_effector.x, 1e-12);
    EXPECT_NEAR(a.end_effector.y, b.end_effector.y, 1e-12);
    EXPECT_NEAR(a.elbow.x, b.elbow.x, 1e-12);
  }
}

TEST(Jacobian, MatchesFiniteDifferences) {
  Rng rng(13);
  const ArmModel arm{{0, 0}, 0.5, 0.5};
  for (int i = 0; i < 50; ++i) {
    const JointState q{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
    const auto j = jacobian(arm, q);
    const double h = 1e-6;
    const Vec2 e = end_effector(arm, q);
    const Vec2 d1 = (1.0 / h) * (end_effector(arm, {q.q1 + h, q.q2}) - e);
    const Vec2 d2 = (1.0 / h) * (end_effector(arm, {q.q1, q.q2 + h}) - e);
    EXPECT_NEAR(j[0].x, d1.x, 1e-5);
    EXPECT_NEAR(j[0].y, d1.y, 1e-5);
    EXPECT_NEAR(j[1].x, d2.x, 1e-5);
    EXPECT_NEAR(j[1].y, d2.y, 1e-5);
  }
}

TEST(InverseKinematics, BothBranchesReachTarget) {
  Rng rng(14);
  const ArmModel arm{{-0.8, 0}};
  int checked = 0;
  while (checked < 200) {
    const Vec2 t{rng.uniform(-1.8, 0.2), rng.uniform(-1, 1)};
    const auto sol = inverse_kinematics(arm, t);
    ASSERT_EQ(sol.has_value(), reachable(arm, t));
    if (!sol) continue;
    for (const JointState& q : *sol) EXPECT_LT(distance(end_effector(arm, q), t), 1e-9);
    ++checked;
  }
}

TEST(Angles, NormalizedToHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(normalize_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(normalize_angle(-kPi), kPi);
  EXPECT_NEAR(normalize_angle(3 * kPi), kPi, 1e-12);
  EXPECT_NEAR(normalize_angle(0.25 + 4 * kPi), 0.25, 1e-12);
  EXPECT_NEAR(angle_diff(kPi - 0.1, -kPi + 0.1), -0.2, 1e-12);
}

TEST(ArmsCollide, SeparatedBases) {
  const ArmModel a{{-5, 0}}, b{{5, 0}};
  EXPECT_FALSE(arms_collide(a, {kPi / 2, kPi / 2}, b, {kPi / 2, -kPi / 2}));
}

TEST(ArmsCollide, IdenticalArms) {
  const ArmModel a{{0.1, 0.2}};
  EXPECT_TRUE(arms_collide(a, {0.3, 0.4}, a, {0.3, 0.4}));
}

TEST(ArmsCollide, AgreesWithPointSamplingOracle) {
  // Bases drawn close together so contacts are common.
  Rng rng(15);
  int compared = 0, hits = 0;
  for (int i = 0; i < 1000; ++i) {
    const ArmModel a{{rng.uniform(-0.6, 0.0), rng.uniform(-0.3, 0.3)}};
    const ArmModel b{{rng.uniform(0.0, 0.6), rng.uniform(-0.3, 0.3)}};
    const JointState qa{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
    const JointState qb{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
    const double d = sampled_arm_distance(a, qa, b, qb);
    const double threshold = a.link_radius + b.link_radius;
    if (std::abs(d - threshold) <= 1e-3) continue;
    ++compared;
    const bool expected = d < threshold;
    hits += expected;
    EXPECT_EQ(arms_collide(a, qa, b, qb), expected) << "qa=" << qa.q1 << "," << qa.q2;
    EXPECT_NEAR(arm_distance(a, qa, b, qb), d, 1e-3);
  }
  EXPECT_GT(compared, 950);
  EXPECT_GT(hits, 100);
  EXPECT_LT(hits, compared - 100);
}

TEST(ArmsCollide, Symmetric) {
  Rng rng(16);
  const Workspace ws;
  for (int i = 0; i < 500; ++i) {
    const JointState qa{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
    const JointState qb{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
    EXPECT_EQ(arms_collide(ws.arms[0], qa, ws.arms[1], qb), arms_collide(ws.arms[1], qb, ws.arms[0], qa));
  }
}

TEST(SegmentDistance, ParallelAndCrossing) {
  EXPECT_NEAR(segment_distance({0, 0}, {1, 0}, {0, 1}, {1, 1}), 1.0, 1e-15);
  EXPECT_NEAR(segment_distance({0, 0}, {1, 1}, {0, 1}, {1, 0}), 0.0, 1e-15);
  EXPECT_NEAR(segment_distance({0, 0}, {1, 0}, {2, 0}, {3, 0}), 1.0, 1e-15);
  EXPECT_NEAR(segment_distance({0, 0}, {0, 0}, {1, -1}, {1, 1}), 1.0, 1e-15);
}

TaskSpec sample_task() {
  TaskSpec t;
  t.objects = {Vec2{-0.1, 0.6}, Vec2{0.1, -0.6}};
  return t;
}

TEST(StepWorld, ZeroVelocityOnlyAdvancesClock) {
  const TaskSpec task = sample_task();
  const WorldState w = initial_world(task);
  const WorldState n = step_world(w, task, {JointVelocity{}, JointVelocity{}}, 0.1);
  WorldState expected = w;
  expected.clock = 0.1;
  EXPECT_EQ(n, expected);
}

TEST(StepWorld, GraspAtExactContact) {
  TaskSpec task = sample_task();
  WorldState w = initial_world(task);
  task.objects[0] = end_effector(task.workspace.arms[0], w.joints[0]);
  w.object_positions = task.objects;
  const WorldState n = step_world(w, task, {JointVelocity{}, JointVelocity{}}, 0.1);
  EXPECT_EQ(n.phase[0], Phase::Carrying);
  EXPECT_TRUE(n.grasped[0]);
  EXPECT_EQ(n.phase[1], Phase::ReachingObject);
}

TEST(StepWorld, GraspRadiusBoundary) {
  TaskSpec task = sample_task();
  WorldState w = initial_world(task);
  const Vec2 ee = end_effector(task.workspace.arms[0], w.joints[0]);
  task.grasp_radius = 0.05;
  task.objects[0] = ee + Vec2{0.0, 0.0499999};
  EXPECT_EQ(step_world(w, task, {JointVelocity{}, JointVelocity{}}, 0.1).phase[0], Phase::Carrying);
  task.objects[0] = ee + Vec2{0.0, 0.0500001};
  EXPECT_EQ(step_world(w, task, {JointVelocity{}, JointVelocity{}}, 0.1).phase[0], Phase::ReachingObject);
}

TEST(StepWorld, ConstantVelocityEulerIntegration) {
  const TaskSpec task = sample_task();
  WorldState w = initial_world(task);
  w.joints = {JointState{0.1, 0.2}, JointState{-0.3, 0.4}};
  const JointState start = w.joints[1];
  for (int i = 0; i < 10; ++i) w = step_world(w, task, {JointVelocity{}, JointVelocity{0.5, 0.5}}, 0.1);
  EXPECT_NEAR(w.joints[1].q1, start.q1 + 0.5, 1e-12);
  EXPECT_NEAR(w.joints[1].q2, start.q2 + 0.5, 1e-12);
  EXPECT_NEAR(w.clock, 1.0, 1e-12);
}

TEST(StepWorld, RejectsOverspeed) {
  const TaskSpec task = sample_task();
  const WorldState w = initial_world(task);
  EXPECT_THROW(step_world(w, task, {JointVelocity{2.0, 0.0}, JointVelocity{}}, 0.1), std::invalid_argument);
  EXPECT_THROW(step_world(w, task, {JointVelocity{}, JointVelocity{}}, 0.0), std::invalid_argument);
}

TEST(StepWorld, CarriedObjectFollowsAndPhaseNeverRegresses) {
  TaskSpec task = sample_task();
  WorldState w = initial_world(task);
  w.phase[0] = Phase::Carrying;
  w.grasped[0] = true;
  task.destinations[0] = Region{end_effector(task.workspace.arms[0], {w.joints[0].q1 + 0.5, w.joints[0].q2}), 0.02};
  Phase last = w.phase[0];
  for (int i = 0; i < 12; ++i) {
    w = step_world(w, task, {JointVelocity{0.5, 0.0}, JointVelocity{}}, 0.1);
    EXPECT_GE(static_cast<int>(w.phase[0]), static_cast<int>(last));
    last = w.phase[0];
    if (w.phase[0] == Phase::Carrying) {
      const Vec2 ee = end_effector(task.workspace.arms[0], w.joints[0]);
      EXPECT_EQ(w.object_positions[0], ee);
    }
    EXPECT_EQ(w.phase[0] == Phase::Carrying, w.grasped[0]);
  }
  EXPECT_EQ(w.phase[0], Phase::Done);
  const WorldState frozen = step_world(w, task, {JointVelocity{0.5, 0.5}, JointVelocity{}}, 0.1);
  EXPECT_EQ(frozen.joints[0], w.joints[0]);
  EXPECT_EQ(frozen.phase[0], Phase::Done);
}

TEST(StepWorld, Deterministic) {
  const TaskSpec task = sample_task();
  WorldState a = initial_world(task), b = initial_world(task);
  for (int i = 0; i < 20; ++i) {
    const PerAgent<JointVelocity> v{JointVelocity{0.3, -0.7}, JointVelocity{-1.2, 0.05 * i}};
    a = step_world(a, task, v, 0.1);
    b = step_world(b, task, v, 0.1);
  }
  EXPECT_EQ(a, b);
}

TEST(TaskSpecValidation, RejectsOutOfBounds) {
  TaskSpec t = sample_task();
  EXPECT_NO_THROW(t.validate());
  t.objects[1] = {2.0, 0.0};
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t = sample_task();
  t.grasp_radius = 0.0;
  EXPECT_THROW(t.validate(), std::invalid_argument);
  ArmModel bad;
  bad.v_max = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Seeds, DerivationIsOrderSensitiveAndStable) {
  EXPECT_EQ(derive_seed({1, 2, 3}), derive_seed({1, 2, 3}));
  EXPECT_NE(derive_seed({1, 2, 3}), derive_seed({3, 2, 1}));
  EXPECT_NE(derive_seed({1, 2}), derive_seed({1, 2, 0}));
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.uniform(), b.uniform());
  Rng c(6);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace parplay
