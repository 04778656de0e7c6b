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
#include <array>
#include <cmath>
#include <limits>

namespace cavsim
{

/// Rectangle oriented along a heading (vehicle footprint).
struct OrientedBox
{
  Vec2 center;
  double half_length = 0.0;  // along heading
  double half_width = 0.0;   // across heading
  double heading = 0.0;      // rad

  Vec2 axis_long() const { return {std::cos(heading), std::sin(heading)}; }
  Vec2 axis_lat() const { return {-std::sin(heading), std::cos(heading)}; }

  std::array<Vec2, 4> corners() const
  {
    const Vec2 u = axis_long() * half_length;
    const Vec2 v = axis_lat() * half_width;
    return {center + u + v, center + u - v, center - u - v, center - u + v};
  }

  /// Radius of the circumscribed circle.
  double circumradius() const { return std::hypot(half_length, half_width); }
};

namespace detail
{

// Half-length of the box's projection onto a unit axis.
inline double projection_radius(const OrientedBox & box, const Vec2 & axis)
{
  return box.half_length * std::abs(box.axis_long().dot(axis)) +
         box.half_width * std::abs(box.axis_lat().dot(axis));
}

inline bool separated_on(const OrientedBox & a, const OrientedBox & b, const Vec2 & axis)
{
  const double dist = std::abs((b.center - a.center).dot(axis));
  return dist > projection_radius(a, axis) + projection_radius(b, axis);
}

inline double segment_point_distance(const Vec2 & p, const Vec2 & q, const Vec2 & x)
{
  const Vec2 d = q - p;
  const double len2 = d.norm2();
  if (len2 == 0.0) return distance(p, x);
  const double t = std::clamp((x - p).dot(d) / len2, 0.0, 1.0);
  return distance(p + d * t, x);
}

inline double segment_segment_distance(
  const Vec2 & p1, const Vec2 & p2, const Vec2 & q1, const Vec2 & q2)
{
  const Vec2 d1 = p2 - p1;
  const Vec2 d2 = q2 - q1;
  const Vec2 r = p1 - q1;
  const double denom = d1.cross(d2);
  if (denom != 0.0) {
    const double t = d2.cross(r) / denom;
    const double u = d1.cross(r) / denom;
    if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) return 0.0;  // proper intersection
  }
  return std::min(
    std::min(segment_point_distance(p1, p2, q1), segment_point_distance(p1, p2, q2)),
    std::min(segment_point_distance(q1, q2, p1), segment_point_distance(q1, q2, p2)));
}

}  // namespace detail

/// Separating-axis overlap test between two oriented rectangles. Touching
/// counts as overlap.
inline bool overlap(const OrientedBox & a, const OrientedBox & b)
{
  return !detail::separated_on(a, b, a.axis_long()) && !detail::separated_on(a, b, a.axis_lat()) &&
         !detail::separated_on(a, b, b.axis_long()) && !detail::separated_on(a, b, b.axis_lat());
}

/// Oriented rectangle vs disc overlap (vehicle vs pedestrian footprints).
inline bool overlap(const OrientedBox & box, const Vec2 & disc_center, double radius)
{
  const Vec2 rel = disc_center - box.center;
  const double lx = std::abs(rel.dot(box.axis_long()));
  const double ly = std::abs(rel.dot(box.axis_lat()));
  const double dx = std::max(0.0, lx - box.half_length);
  const double dy = std::max(0.0, ly - box.half_width);
  return dx * dx + dy * dy <= radius * radius;
}

/// Exact boundary-to-boundary separation between two oriented rectangles
/// (0 when they overlap). Both shapes are convex, so the distance between
/// disjoint boxes is attained between boundary segments.
inline double separation(const OrientedBox & a, const OrientedBox & b)
{
  if (overlap(a, b)) return 0.0;
  const auto ca = a.corners();
  const auto cb = b.corners();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(
        best, detail::segment_segment_distance(
                ca[i], ca[(i + 1) % 4], cb[j], cb[(j + 1) % 4]));
    }
  }
  return best;
}

/// Exact separation between an oriented rectangle and a disc.
inline double separation(const OrientedBox & box, const Vec2 & disc_center, double radius)
{
  const Vec2 rel = disc_center - box.center;
  const double lx = std::abs(rel.dot(box.axis_long()));
  const double ly = std::abs(rel.dot(box.axis_lat()));
  const double dx = std::max(0.0, lx - box.half_length);
  const double dy = std::max(0.0, ly - box.half_width);
  return std::max(0.0, std::hypot(dx, dy) - radius);
}

}  // namespace cavsim
