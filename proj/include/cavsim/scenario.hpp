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

#include "cavsim/kvfile.hpp"
#include "cavsim/vec2.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavsim
{

/// Dimensioned description of the urban scenario: one east-west main road
/// crossed by two north-south side roads at unregulated intersections, a
/// pedestrian lane running parallel to the main road, and three unregulated
/// zebra crossings (one across the main road, one across each side road).
/// Vehicles enter at v1..v6 (one per road direction), pedestrians at either
/// end of the pedestrian lane (p1/p2). All routes are straight; the map is
/// axis-aligned.
struct ScenarioConfig
{
  double road_length = 500.0;         // m, main road and side roads
  double intersection_x1 = 175.0;     // m, first side road position
  double intersection_x2 = 325.0;     // m, second side road position
  double lane_width = 6.0;            // m, each road has two lanes
  double sidewalk_offset = 15.0;      // m, pedestrian lane y; leaves room for
                                      // one car between a side-road zebra and
                                      // the intersection box
  double main_crossing_x = 100.0;     // m, zebra across the main road
  double crossing_width = 3.0;        // m, zebra stripe width
  double vehicle_length = 5.0;        // m
  double vehicle_width = 1.8;         // m
  double pedestrian_radius = 0.3;     // m
  double vehicle_max_speed = 13.89;   // m/s (50 km/h)
  double pedestrian_speed = 2.0;      // m/s
  double vehicle_max_accel = 2.5;     // m/s^2
  double vehicle_max_decel = 4.5;     // m/s^2

  void validate() const
  {
    if (road_length <= 0 || lane_width <= 0) {
      throw ConfigError{"scenario: road_length and lane_width must be positive"};
    }
    if (intersection_x1 <= lane_width || intersection_x2 >= road_length - lane_width ||
        intersection_x1 >= intersection_x2) {
      throw ConfigError{"scenario: intersections must lie inside the main road, x1 < x2"};
    }
    if (main_crossing_x <= 0 || main_crossing_x >= road_length) {
      throw ConfigError{"scenario: main_crossing_x must lie on the main road"};
    }
    if (vehicle_max_speed <= 0 || pedestrian_speed <= 0 || vehicle_max_accel <= 0 ||
        vehicle_max_decel <= 0) {
      throw ConfigError{"scenario: speeds and accelerations must be positive"};
    }
    if (vehicle_length <= 0 || vehicle_width <= 0 || pedestrian_radius <= 0) {
      throw ConfigError{"scenario: entity dimensions must be positive"};
    }
  }
};

inline ScenarioConfig load_scenario(const std::string & path)
{
  KvFile kv = KvFile::parse_file(path);
  ScenarioConfig s;
  s.road_length = kv.get_double("road_length", s.road_length);
  s.intersection_x1 = kv.get_double("intersection_x1", s.intersection_x1);
  s.intersection_x2 = kv.get_double("intersection_x2", s.intersection_x2);
  s.lane_width = kv.get_double("lane_width", s.lane_width);
  s.sidewalk_offset = kv.get_double("sidewalk_offset", s.sidewalk_offset);
  s.main_crossing_x = kv.get_double("main_crossing_x", s.main_crossing_x);
  s.crossing_width = kv.get_double("crossing_width", s.crossing_width);
  s.vehicle_length = kv.get_double("vehicle_length", s.vehicle_length);
  s.vehicle_width = kv.get_double("vehicle_width", s.vehicle_width);
  s.pedestrian_radius = kv.get_double("pedestrian_radius", s.pedestrian_radius);
  s.vehicle_max_speed = kv.get_double("vehicle_max_speed", s.vehicle_max_speed);
  s.pedestrian_speed = kv.get_double("pedestrian_speed", s.pedestrian_speed);
  s.vehicle_max_accel = kv.get_double("vehicle_max_accel", s.vehicle_max_accel);
  s.vehicle_max_decel = kv.get_double("vehicle_max_decel", s.vehicle_max_decel);
  kv.reject_unknown_keys();
  s.validate();
  return s;
}

/// Straight or polyline route parameterized by arc length.
class Route
{
public:
  Route() = default;
  explicit Route(std::vector<Vec2> waypoints) : points_(std::move(waypoints))
  {
    cum_.resize(points_.size(), 0.0);
    for (std::size_t i = 1; i < points_.size(); ++i) {
      cum_[i] = cum_[i - 1] + distance(points_[i - 1], points_[i]);
    }
  }

  double length() const { return cum_.empty() ? 0.0 : cum_.back(); }

  Vec2 point_at(double s) const
  {
    const auto [i, local] = segment_at(s);
    const Vec2 d = points_[i + 1] - points_[i];
    const double seg_len = cum_[i + 1] - cum_[i];
    return points_[i] + d * (seg_len > 0 ? local / seg_len : 0.0);
  }

  double heading_at(double s) const
  {
    const auto [i, local] = segment_at(s);
    const Vec2 d = points_[i + 1] - points_[i];
    return std::atan2(d.y, d.x);
  }

  const std::vector<Vec2> & waypoints() const { return points_; }

private:
  std::pair<std::size_t, double> segment_at(double s) const
  {
    const double clamped = std::min(std::max(s, 0.0), length());
    std::size_t i = 0;
    while (i + 2 < points_.size() && cum_[i + 1] < clamped) ++i;
    return {i, clamped - cum_[i]};
  }

  std::vector<Vec2> points_;
  std::vector<double> cum_;
};

/// Axis-aligned conflict area (intersection box or zebra crossing).
struct ConflictZone
{
  enum class Type { kIntersection, kCrossing };

  Type type = Type::kIntersection;
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  int id = 0;

  bool contains(const Vec2 & p, double margin = 0.0) const
  {
    return p.x >= min_x - margin && p.x <= max_x + margin && p.y >= min_y - margin &&
           p.y <= max_y + margin;
  }
};

/// Interval of a route covered by a conflict zone.
struct ZoneSpan
{
  int zone_id = 0;
  double s_entry = 0;
  double s_exit = 0;
};

constexpr int kNumVehicleEntries = 6;
constexpr int kNumPedestrianEntries = 2;

/// Routes, conflict zones and their per-route spans, derived from a
/// ScenarioConfig.
struct RoadNetwork
{
  ScenarioConfig cfg;
  std::array<Route, kNumVehicleEntries> vehicle_routes;     // v1..v6
  std::array<Route, kNumPedestrianEntries> pedestrian_routes;  // p1, p2
  std::vector<ConflictZone> zones;
  // spans[k][route] lists zones crossed by that route, ordered by s_entry;
  // k = 0 vehicles, 1 pedestrians.
  std::array<std::vector<std::vector<ZoneSpan>>, 2> spans;

  static RoadNetwork build(const ScenarioConfig & cfg)
  {
    cfg.validate();
    RoadNetwork net;
    net.cfg = cfg;

    const double L = cfg.road_length;
    const double half_lane = cfg.lane_width / 2.0;   // lane centerline offset
    const double road_half = cfg.lane_width;         // two lanes
    const double cross_half = cfg.road_length / 2.0; // side roads centered on y = 0
    const double x1 = cfg.intersection_x1;
    const double x2 = cfg.intersection_x2;
    const double walk_y = cfg.sidewalk_offset;
    const double xc = cfg.main_crossing_x;

    // Right-hand traffic: eastbound uses the south lane, northbound the east lane.
    net.vehicle_routes[0] = Route{{{0, -half_lane}, {L, -half_lane}}};                    // v1 east
    net.vehicle_routes[1] = Route{{{L, half_lane}, {0, half_lane}}};                      // v2 west
    net.vehicle_routes[2] = Route{{{x1 + half_lane, -cross_half}, {x1 + half_lane, cross_half}}};  // v3 north
    net.vehicle_routes[3] = Route{{{x1 - half_lane, cross_half}, {x1 - half_lane, -cross_half}}};  // v4 south
    net.vehicle_routes[4] = Route{{{x2 + half_lane, -cross_half}, {x2 + half_lane, cross_half}}};  // v5 north
    net.vehicle_routes[5] = Route{{{x2 - half_lane, cross_half}, {x2 - half_lane, -cross_half}}};  // v6 south

    // The pedestrian lane starts on the south sidewalk, crosses the main
    // road at xc, then follows the north sidewalk across both side roads.
    net.pedestrian_routes[0] =
      Route{{{0, -walk_y}, {xc, -walk_y}, {xc, walk_y}, {L, walk_y}}};  // p1 west end
    net.pedestrian_routes[1] =
      Route{{{L, walk_y}, {xc, walk_y}, {xc, -walk_y}, {0, -walk_y}}};  // p2 east end

    const double half_stripe = cfg.crossing_width / 2.0;
    net.zones = {
      {ConflictZone::Type::kIntersection, x1 - road_half, x1 + road_half, -road_half, road_half, 0},
      {ConflictZone::Type::kIntersection, x2 - road_half, x2 + road_half, -road_half, road_half, 1},
      {ConflictZone::Type::kCrossing, xc - half_stripe, xc + half_stripe, -road_half, road_half, 2},
      {ConflictZone::Type::kCrossing, x1 - road_half, x1 + road_half, walk_y - half_stripe,
       walk_y + half_stripe, 3},
      {ConflictZone::Type::kCrossing, x2 - road_half, x2 + road_half, walk_y - half_stripe,
       walk_y + half_stripe, 4},
    };

    net.spans[0].resize(kNumVehicleEntries);
    for (int r = 0; r < kNumVehicleEntries; ++r) {
      net.spans[0][r] = zone_spans(net.vehicle_routes[r], net.zones);
    }
    net.spans[1].resize(kNumPedestrianEntries);
    for (int r = 0; r < kNumPedestrianEntries; ++r) {
      net.spans[1][r] = zone_spans(net.pedestrian_routes[r], net.zones);
    }
    return net;
  }

private:
  static std::vector<ZoneSpan> zone_spans(const Route & route, const std::vector<ConflictZone> & zones)
  {
    std::vector<ZoneSpan> out;
    const auto & pts = route.waypoints();
    double s0 = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const Vec2 a = pts[i];
      const Vec2 b = pts[i + 1];
      const double seg_len = distance(a, b);
      if (seg_len == 0.0) continue;
      for (const ConflictZone & z : zones) {
        // Clip the segment against the axis-aligned box (slab method).
        double t0 = 0.0, t1 = 1.0;
        bool hit = true;
        const double d[2] = {b.x - a.x, b.y - a.y};
        const double lo[2] = {z.min_x, z.min_y};
        const double hi[2] = {z.max_x, z.max_y};
        const double p[2] = {a.x, a.y};
        for (int axis = 0; axis < 2 && hit; ++axis) {
          if (d[axis] == 0.0) {
            if (p[axis] < lo[axis] || p[axis] > hi[axis]) hit = false;
          } else {
            double ta = (lo[axis] - p[axis]) / d[axis];
            double tb = (hi[axis] - p[axis]) / d[axis];
            if (ta > tb) std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
            if (t0 > t1) hit = false;
          }
        }
        if (hit) {
          out.push_back({z.id, s0 + t0 * seg_len, s0 + t1 * seg_len});
        }
      }
      s0 += seg_len;
    }
    std::sort(out.begin(), out.end(), [](const ZoneSpan & a, const ZoneSpan & b) {
      return a.s_entry < b.s_entry;
    });
    return out;
  }
};

}  // namespace cavsim
