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

#include "cavsim/detector.hpp"
#include "cavsim/entity.hpp"
#include "cavsim/mobility.hpp"

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavsim
{

struct LogFormatError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

/// Shortest representation that round-trips the exact double. Locale
/// independent; replaying a log therefore reconstructs bit-identical values.
inline std::string format_double(double v)
{
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double_field(const std::string & s)
{
  double v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw LogFormatError{"bad numeric field: '" + s + "'"};
  }
  return v;
}

inline std::uint64_t parse_id_field(const std::string & s)
{
  std::uint64_t v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw LogFormatError{"bad id field: '" + s + "'"};
  }
  return v;
}

namespace detail
{

inline std::vector<std::string> split_fields(const std::string & line)
{
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

inline void expect_header(std::istream & in, const std::string & expected, const char * what)
{
  std::string line;
  if (!std::getline(in, line) || line != expected) {
    throw LogFormatError{std::string{"missing or wrong header for "} + what + " log"};
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Trajectory log ("floating entity data"): one line per entity sample, taken
// on the entity's own emission clock, so the file doubles as the exact
// CAM-equivalent record for offline replay.

struct TrajectorySample
{
  double time = 0.0;
  EntityId id = 0;
  EntityClass cls = EntityClass::kVehicle;
  double x = 0.0, y = 0.0;
  double speed = 0.0;
  double heading = 0.0;  // rad
  double accel = 0.0;    // m/s^2 along heading
};

inline constexpr const char * kTrajectoryHeader = "time,id,class,x,y,speed,heading,accel";
inline constexpr const char * kAlertHeader = "issued_at,id_a,id_b,kind,t_star,d_star";
inline constexpr const char * kCollisionHeader = "time,id_a,id_b,kind,x,y";

inline void write_trajectory_row(std::ostream & os, const TrajectorySample & s)
{
  os << format_double(s.time) << ',' << s.id << ',' << to_string(s.cls) << ','
     << format_double(s.x) << ',' << format_double(s.y) << ',' << format_double(s.speed) << ','
     << format_double(s.heading) << ',' << format_double(s.accel) << '\n';
}

inline void write_trajectory(std::ostream & os, const std::vector<TrajectorySample> & rows)
{
  os << kTrajectoryHeader << '\n';
  for (const auto & s : rows) write_trajectory_row(os, s);
}

inline std::vector<TrajectorySample> read_trajectory(std::istream & in)
{
  detail::expect_header(in, kTrajectoryHeader, "trajectory");
  std::vector<TrajectorySample> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 8) throw LogFormatError{"trajectory row needs 8 fields: " + line};
    out.push_back(
      {parse_double_field(f[0]), parse_id_field(f[1]), entity_class_from_string(f[2]),
       parse_double_field(f[3]), parse_double_field(f[4]), parse_double_field(f[5]),
       parse_double_field(f[6]), parse_double_field(f[7])});
  }
  return out;
}

/// The CAM an entity would have sent at this sample. Live emission and
/// offline replay both build CAMs through this function, which keeps the two
/// paths bit-identical.
inline Cam cam_from_sample(const TrajectorySample & s)
{
  Cam cam;
  cam.sender_id = s.id;
  cam.cls = s.cls;
  cam.generated_at = s.time;
  cam.state.position = {s.x, s.y};
  const Vec2 dir{std::cos(s.heading), std::sin(s.heading)};
  cam.state.velocity = dir * s.speed;
  cam.state.acceleration = dir * s.accel;
  return cam;
}

// ---------------------------------------------------------------------------
// Alert log: field order fixed by the analysis parser.

struct AlertRow
{
  double issued_at = 0.0;
  EntityId id_a = 0;
  EntityId id_b = 0;
  PairKind kind = PairKind::kVehVeh;
  double t_star = 0.0;
  double d_star = 0.0;

  PairKey pair() const { return {id_a, id_b}; }
};

inline AlertRow to_row(const Alert & a)
{
  return {a.issued_at, a.pair.a, a.pair.b, a.kind, a.predicted_t_star, a.predicted_d_star};
}

inline void write_alert_row(std::ostream & os, const AlertRow & a)
{
  os << format_double(a.issued_at) << ',' << a.id_a << ',' << a.id_b << ',' << to_string(a.kind)
     << ',' << format_double(a.t_star) << ',' << format_double(a.d_star) << '\n';
}

inline void write_alerts(std::ostream & os, const std::vector<AlertRow> & rows)
{
  os << kAlertHeader << '\n';
  for (const auto & a : rows) write_alert_row(os, a);
}

inline std::vector<AlertRow> read_alerts(std::istream & in)
{
  detail::expect_header(in, kAlertHeader, "alert");
  std::vector<AlertRow> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 6) throw LogFormatError{"alert row needs 6 fields: " + line};
    out.push_back(
      {parse_double_field(f[0]), parse_id_field(f[1]), parse_id_field(f[2]),
       pair_kind_from_string(f[3]), parse_double_field(f[4]), parse_double_field(f[5])});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Collision log.

inline void write_collision_row(std::ostream & os, const CollisionRecord & c)
{
  os << format_double(c.time) << ',' << c.pair.a << ',' << c.pair.b << ',' << to_string(c.kind)
     << ',' << format_double(c.position.x) << ',' << format_double(c.position.y) << '\n';
}

inline void write_collisions(std::ostream & os, const std::vector<CollisionRecord> & rows)
{
  os << kCollisionHeader << '\n';
  for (const auto & c : rows) write_collision_row(os, c);
}

inline std::vector<CollisionRecord> read_collisions(std::istream & in)
{
  detail::expect_header(in, kCollisionHeader, "collision");
  std::vector<CollisionRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 6) throw LogFormatError{"collision row needs 6 fields: " + line};
    CollisionRecord c;
    c.time = parse_double_field(f[0]);
    c.pair = PairKey{parse_id_field(f[1]), parse_id_field(f[2])};
    c.kind = pair_kind_from_string(f[3]);
    c.position = {parse_double_field(f[4]), parse_double_field(f[5])};
    out.push_back(c);
  }
  return out;
}

}  // namespace cavsim
