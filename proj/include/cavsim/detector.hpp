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

#include "cavsim/entity.hpp"
#include "cavsim/kinematics.hpp"
#include "cavsim/spatial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace cavsim
{

/// One cooperative awareness message.
struct Cam
{
  EntityId sender_id = 0;
  EntityClass cls = EntityClass::kVehicle;
  double generated_at = 0.0;  // s, simulation time
  KinematicState state;
};

/// Collision thresholds for one entity class.
struct ClassThresholds
{
  double t2c_t;  // s, time-to-collision threshold
  double s2c_t;  // m, space-to-collision threshold
};

struct DetectorParams
{
  ClassThresholds vehicle{10.0, 5.0};
  ClassThresholds pedestrian{5.0, 2.0};
  double max_cam_age = 0.8;             // s
  double cam_frequency_hz = 10.0;       // per entity
  double alert_max_frequency_hz = 1.0;  // per pair

  const ClassThresholds & thresholds_for(EntityClass c) const
  {
    return c == EntityClass::kVehicle ? vehicle : pedestrian;
  }

  /// Mixed vehicle/pedestrian pairs are governed by the stricter pedestrian
  /// thresholds.
  const ClassThresholds & governing(EntityClass a, EntityClass b) const
  {
    return (a == EntityClass::kPedestrian || b == EntityClass::kPedestrian) ? pedestrian : vehicle;
  }

  double min_alert_interval() const { return 1.0 / alert_max_frequency_hz; }

  void validate() const
  {
    const bool ok = vehicle.t2c_t > 0 && vehicle.s2c_t > 0 && pedestrian.t2c_t > 0 &&
                    pedestrian.s2c_t > 0 && max_cam_age > 0 && cam_frequency_hz > 0 &&
                    alert_max_frequency_hz > 0;
    if (!ok) throw std::invalid_argument{"detector parameters must be strictly positive"};
  }
};

/// Candidate search radius around a CAM sender ("range of action"):
/// max(speed * t2c_t, s2c_t) for the sender's class.
inline double action_radius(double speed, const ClassThresholds & th)
{
  return std::max(speed * th.t2c_t, th.s2c_t);
}

enum class IngestResult { kStored, kStale };

/// Latest CAM per sender with a uniform-grid index over sender positions.
/// Entries older than max_cam_age relative to the query time are never
/// returned; an older CAM never overwrites a newer one from the same sender.
class CamStore
{
public:
  explicit CamStore(double grid_cell_size = 140.0) : grid_(grid_cell_size) {}

  IngestResult ingest(const Cam & cam, double now, const DetectorParams & params)
  {
    if (!cam.state.finite() || !std::isfinite(cam.generated_at)) {
      throw std::invalid_argument{"CAM with non-finite fields rejected"};
    }
    if (now - cam.generated_at > params.max_cam_age) {
      return IngestResult::kStale;
    }
    auto it = entries_.find(cam.sender_id);
    if (it == entries_.end()) {
      entries_.emplace(cam.sender_id, cam);
      grid_.insert(cam.sender_id, cam.state.position);
      return IngestResult::kStored;
    }
    if (it->second.generated_at >= cam.generated_at) {
      return IngestResult::kStale;  // out-of-order delivery, keep newer entry
    }
    grid_.move(cam.sender_id, it->second.state.position, cam.state.position);
    it->second = cam;
    return IngestResult::kStored;
  }

  const Cam * find(EntityId id) const
  {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
  }

  /// Fresh CAMs within `radius` of `center`, sorted by sender id.
  std::vector<Cam> fresh_within(
    const Vec2 & center, double radius, double now, double max_age) const
  {
    std::vector<Cam> out;
    for (EntityId id : grid_.query(center, radius)) {
      const Cam & cam = entries_.at(id);
      if (now - cam.generated_at > max_age) continue;
      if (distance(cam.state.position, center) > radius) continue;
      out.push_back(cam);
    }
    std::sort(out.begin(), out.end(), [](const Cam & a, const Cam & b) {
      return a.sender_id < b.sender_id;
    });
    return out;
  }

  std::size_t size() const { return entries_.size(); }

  void erase(EntityId id)
  {
    auto it = entries_.find(id);
    if (it == entries_.end()) return;
    grid_.remove(id, it->second.state.position);
    entries_.erase(it);
  }

  /// All entries sorted by sender id (test support).
  std::vector<Cam> all() const
  {
    std::vector<Cam> out;
    out.reserve(entries_.size());
    for (const auto & [id, cam] : entries_) out.push_back(cam);
    std::sort(out.begin(), out.end(), [](const Cam & a, const Cam & b) {
      return a.sender_id < b.sender_id;
    });
    return out;
  }

private:
  std::unordered_map<EntityId, Cam> entries_;
  UniformGrid<EntityId> grid_;
};

/// Fresh CAMs from other senders within the sender's range of action.
/// Pedestrian-with-pedestrian pairs are skipped.
inline std::vector<Cam> candidate_set(
  const Cam & cam, const CamStore & store, double now, const DetectorParams & params)
{
  const double radius = action_radius(cam.state.velocity.norm(), params.thresholds_for(cam.cls));
  std::vector<Cam> out;
  for (Cam & c : store.fresh_within(cam.state.position, radius, now, params.max_cam_age)) {
    if (c.sender_id == cam.sender_id) continue;
    if (cam.cls == EntityClass::kPedestrian && c.cls == EntityClass::kPedestrian) continue;
    out.push_back(std::move(c));
  }
  return out;
}

/// One detected collision course, with the closest-approach prediction that
/// triggered it.
struct CollisionCourse
{
  EntityId other = 0;
  EntityClass other_cls = EntityClass::kVehicle;
  double t_star = 0.0;
  double d_star = 0.0;
};

namespace detail
{

inline KinematicState extrapolated_to(const Cam & cam, double now)
{
  KinematicState s = cam.state;
  s.position += s.velocity * (now - cam.generated_at);
  return s;
}

}  // namespace detail

/// Runs the closest-approach check of the detection algorithm against every
/// candidate, with both states advanced to `now` under constant velocity.
/// A candidate is on a collision course when the pair approaches with
/// t* <= t2c_t and d* <= s2c_t, or moves in parallel at distance <= s2c_t;
/// the governing thresholds are those of the stricter class in the pair.
inline std::vector<CollisionCourse> detect_collisions(
  const Cam & cam, const CamStore & store, double now, const DetectorParams & params)
{
  const KinematicState self = detail::extrapolated_to(cam, now);
  std::vector<CollisionCourse> out;
  for (const Cam & other : candidate_set(cam, store, now, params)) {
    const ClassThresholds & th = params.governing(cam.cls, other.cls);
    const CpaResult cpa = closest_approach(self, detail::extrapolated_to(other, now));
    bool on_course = false;
    if (cpa.is_approaching()) {
      on_course = cpa.t_star <= th.t2c_t && cpa.d_star <= th.s2c_t;
    } else if (cpa.is_parallel()) {
      on_course = cpa.d_star <= th.s2c_t;
    }
    if (on_course) {
      out.push_back({other.sender_id, other.cls, cpa.t_star, cpa.d_star});
    }
  }
  return out;
}

/// Server warning for one entity pair. Addressed to both members.
struct Alert
{
  PairKey pair;
  double issued_at = 0.0;
  double predicted_t_star = 0.0;
  double predicted_d_star = 0.0;
  PairKind kind = PairKind::kVehVeh;
};

/// Tracks the last alert emission per unordered pair so that the same alert
/// is not generated more than once per 1/alert_max_frequency seconds.
class AlertLimiter
{
public:
  /// True (and records the emission) when the pair's previous alert is more
  /// than `min_interval` seconds old or absent.
  bool allow(const PairKey & pair, double now, double min_interval)
  {
    auto it = last_.find(pair);
    if (it != last_.end() && !(now - it->second > min_interval)) {
      return false;
    }
    last_[pair] = now;
    return true;
  }

  std::size_t pairs_seen() const { return last_.size(); }

private:
  std::map<PairKey, double> last_;
};

/// Turns detected collision courses into rate-limited alerts.
inline std::vector<Alert> emit_alerts(
  EntityId source_id, EntityClass source_cls, const std::vector<CollisionCourse> & colliders,
  double now, AlertLimiter & limiter, const DetectorParams & params)
{
  std::vector<Alert> out;
  for (const CollisionCourse & c : colliders) {
    const PairKey pair{source_id, c.other};
    if (!limiter.allow(pair, now, params.min_alert_interval())) continue;
    out.push_back({pair, now, c.t_star, c.d_star, pair_kind_of(source_cls, c.other_cls)});
  }
  return out;
}

/// Store + limiter + parameters wired together: the full server-side path
/// from a delivered CAM to the alerts it triggers. The same object backs the
/// live coupled simulation and offline replay so both share one code path.
class Detector
{
public:
  explicit Detector(DetectorParams params, double grid_cell_size = 140.0)
  : params_(params), store_(grid_cell_size)
  {
    params_.validate();
  }

  std::vector<Alert> on_cam(const Cam & cam, double now)
  {
    if (store_.ingest(cam, now, params_) == IngestResult::kStale) {
      return {};
    }
    const auto courses = detect_collisions(cam, store_, now, params_);
    return emit_alerts(cam.sender_id, cam.cls, courses, now, limiter_, params_);
  }

  const CamStore & store() const { return store_; }
  const DetectorParams & params() const { return params_; }

private:
  DetectorParams params_;
  CamStore store_;
  AlertLimiter limiter_;
};

}  // namespace cavsim
