#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace parplay {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Maps any finite angle onto (-pi, pi].
inline double normalize_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r -= kTwoPi;
  return r;
}

/// Signed shortest rotation taking `from` to `to`.
inline double angle_diff(double to, double from) { return normalize_angle(to - from); }

struct JointState {
  double q1 = 0.0;
  double q2 = 0.0;

  friend constexpr bool operator==(JointState, JointState) = default;
};

inline JointState normalized(JointState s) {
  return {normalize_angle(s.q1), normalize_angle(s.q2)};
}

/// Largest absolute per-joint displacement, measured along the shortest rotation.
inline double max_joint_displacement(JointState a, JointState b) {
  return std::max(std::abs(angle_diff(b.q1, a.q1)), std::abs(angle_diff(b.q2, a.q2)));
}

/// Closest distance between segments [p0,p1] and [q0,q1].
inline double segment_distance(Vec2 p0, Vec2 p1, Vec2 q0, Vec2 q1) {
  const Vec2 d1 = p1 - p0;
  const Vec2 d2 = q1 - q0;
  const Vec2 r = p0 - q0;
  const double a = dot(d1, d1);
  const double e = dot(d2, d2);
  const double f = dot(d2, r);
  constexpr double eps = 1e-15;

  double s = 0.0;
  double t = 0.0;
  if (a <= eps && e <= eps) return norm(r);
  if (a <= eps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = dot(d1, r);
    if (e <= eps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      s = denom > eps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return distance(p0 + s * d1, q0 + t * d2);
}

}  // namespace parplay
