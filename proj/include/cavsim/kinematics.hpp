// Copyright 2026 cavsim contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "cavsim/vec2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cavsim
{

/// Snapshot of an entity's motion used for trajectory extrapolation.
/// Acceleration may be the zero vector (constant-velocity model).
struct KinematicState
{
  Vec2 position;      // m
  Vec2 velocity;      // m/s
  Vec2 acceleration;  // m/s^2

  bool finite() const { return position.finite() && velocity.finite() && acceleration.finite(); }
};

/// Outcome of a closest-point-of-approach computation between two entities.
///
/// - Approaching: minimum distance d_star is reached at t_star >= 0.
/// - Receding: the entities are getting farther apart (minimum is in the past).
/// - Parallel: zero relative velocity, distance stays at its current value
///   (carried in d_star); t_star is 0 by convention.
struct CpaResult
{
  enum class Kind { kApproaching, kReceding, kParallel };

  Kind kind = Kind::kReceding;
  double t_star = 0.0;  // s
  double d_star = 0.0;  // m; for kParallel this is the constant distance

  static CpaResult approaching(double t, double d) { return {Kind::kApproaching, t, d}; }
  static CpaResult receding() { return {Kind::kReceding, 0.0, 0.0}; }
  static CpaResult parallel(double dist) { return {Kind::kParallel, 0.0, dist}; }

  bool is_approaching() const { return kind == Kind::kApproaching; }
  bool is_parallel() const { return kind == Kind::kParallel; }
};

/// Squared distance between the two entities at time offset t under
/// constant-velocity extrapolation (accelerations ignored).
inline double squared_distance_at(const KinematicState & a, const KinematicState & b, double t)
{
  const Vec2 dp = a.position - b.position;
  const Vec2 dv = a.velocity - b.velocity;
  return (dp + dv * t).norm2();
}

/// Closed-form closest point of approach under constant velocity.
///
/// The squared distance D(t) is quadratic; its minimizer is
/// t* = -(p_a - p_b) . (v_a - v_b) / |v_a - v_b|^2. Zero relative velocity is
/// a division-by-zero hole and is reported as Parallel with the current
/// distance. t* = 0 counts as Approaching (entities are at minimum distance
/// right now); only t* < 0 is Receding.
inline CpaResult closest_approach(const KinematicState & a, const KinematicState & b)
{
  const Vec2 dp = a.position - b.position;
  const Vec2 dv = a.velocity - b.velocity;
  const double rel_speed2 = dv.norm2();
  if (rel_speed2 == 0.0) {
    return CpaResult::parallel(dp.norm());
  }
  const double t_star = -dp.dot(dv) / rel_speed2;
  if (t_star < 0.0) {
    return CpaResult::receding();
  }
  return CpaResult::approaching(std::max(t_star, 0.0), std::sqrt(squared_distance_at(a, b, t_star)));
}

namespace detail
{

/// Position at time offset t under constant acceleration, with speed clamped
/// at zero: a braking entity stops, it does not reverse. The clamp engages
/// only when velocity and acceleration are anti-collinear (the only case in
/// which the speed actually reaches zero).
inline Vec2 position_at(const KinematicState & s, double t)
{
  const double a2 = s.acceleration.norm2();
  if (a2 == 0.0) {
    return s.position + s.velocity * t;
  }
  double t_stop = std::numeric_limits<double>::infinity();
  const double cross = s.velocity.cross(s.acceleration);
  const double along = s.velocity.dot(s.acceleration);
  const double collinear_tol = 1e-12 * std::sqrt(s.velocity.norm2() * a2);
  if (std::abs(cross) <= collinear_tol && along < 0.0) {
    t_stop = s.velocity.norm() / std::sqrt(a2);
  }
  const double tc = std::min(t, t_stop);
  return s.position + s.velocity * tc + s.acceleration * (0.5 * tc * tc);
}

inline double accel_squared_distance_at(const KinematicState & a, const KinematicState & b, double t)
{
  return (position_at(a, t) - position_at(b, t)).norm2();
}

}  // namespace detail

/// Numeric closest point of approach under constant-acceleration
/// extrapolation with speed clamped at zero.
///
/// Grid-samples the squared distance over [0, horizon] at `step`, then
/// refines the bracketing interval by ternary search. With zero
/// accelerations this agrees with closest_approach to well below 1e-6 m in
/// d* and 1e-3 s in t*. On a flat minimum (both entities stopped) t_star is
/// one minimizer, not necessarily the earliest.
inline CpaResult closest_approach_accel(
  const KinematicState & a, const KinematicState & b, double horizon, double step)
{
  if (!(horizon > 0.0) || !(step > 0.0)) {
    throw std::invalid_argument{"closest_approach_accel: horizon and step must be positive"};
  }
  const Vec2 dv = a.velocity - b.velocity;
  const Vec2 da = a.acceleration - b.acceleration;
  if (dv.norm2() == 0.0 && da.norm2() == 0.0) {
    return CpaResult::parallel((a.position - b.position).norm());
  }

  double best_t = 0.0;
  double best_d2 = detail::accel_squared_distance_at(a, b, 0.0);
  const auto samples = static_cast<long>(std::ceil(horizon / step));
  for (long i = 1; i <= samples; ++i) {
    const double t = std::min(static_cast<double>(i) * step, horizon);
    const double d2 = detail::accel_squared_distance_at(a, b, t);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_t = t;
    }
  }

  double lo = std::max(0.0, best_t - step);
  double hi = std::min(horizon, best_t + step);
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-10; ++iter) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (detail::accel_squared_distance_at(a, b, m1) <= detail::accel_squared_distance_at(a, b, m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  const double t_star = 0.5 * (lo + hi);
  const double d2_star = detail::accel_squared_distance_at(a, b, t_star);
  if (d2_star <= best_d2) {
    best_d2 = d2_star;
    best_t = t_star;
  }

  // Minimum at the left edge with distance initially growing means the
  // entities are moving apart.
  if (best_t <= step * 0.5) {
    const Vec2 dp = a.position - b.position;
    if (dp.dot(dv) > 0.0) {
      return CpaResult::receding();
    }
  }
  return CpaResult::approaching(best_t, std::sqrt(best_d2));
}

}  // namespace cavsim
