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
#include "cavsim/geometry.hpp"
#include "cavsim/rng.hpp"
#include "cavsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <future>
#include <iterator>
#include <limits>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace cavsim
{

/// Poisson arrival configuration for the two entity populations.
struct ArrivalConfig
{
  double lambda_v = 0.7;  // vehicles per second
  double lambda_p = 0.1;  // pedestrians per second
  std::uint64_t seed = 1;
};

struct Spawn
{
  double time = 0.0;
  EntityClass cls = EntityClass::kVehicle;
  int entry = 0;  // v1..v6 -> 0..5, p1/p2 -> 0..1
  YieldFlags yields;
};

namespace detail
{
// Substream ids for the per-seed random streams.
constexpr std::uint64_t kStreamVehicleTimes = 0;
constexpr std::uint64_t kStreamPedestrianTimes = 1;
constexpr std::uint64_t kStreamVehicleEntry = 2;
constexpr std::uint64_t kStreamPedestrianEntry = 3;
constexpr std::uint64_t kStreamVehicleViolator = 4;
constexpr std::uint64_t kStreamPedestrianViolator = 5;
}  // namespace detail

/// Probabilities that an agent ignores a priority rule, drawn independently
/// at spawn. The three knobs control the collision mix: drivers treating the
/// unregulated intersections as open road produce vehicle-vehicle crashes,
/// zebra-blind drivers and jaywalkers produce vehicle-pedestrian ones.
/// All-zero yields a collision-free world.
struct ViolationConfig
{
  double vehicle_intersection = 0.8;
  double vehicle_crossing = 0.04;
  double pedestrian = 0.05;

  bool all_zero() const
  {
    return vehicle_intersection == 0.0 && vehicle_crossing == 0.0 && pedestrian == 0.0;
  }
};

/// Per-agent yield behavior resulting from the violation draws.
struct YieldFlags
{
  bool at_intersections = true;
  bool at_crossings = true;
};

/// Timestamped spawn list for both populations, sorted by time.
///
/// Arrival times are built as S_i / lambda where S_i is a unit-rate
/// exponential partial sum drawn from the seed: inter-arrivals are exactly
/// Exp(lambda), and for a fixed seed the arrival set is monotone in lambda
/// (higher rate -> every arrival earlier, plus extra ones). That coupling is
/// what makes the stability sweep's per-seed monotonicity hold by
/// construction on the demand side.
inline std::vector<Spawn> generate_arrivals(
  const ArrivalConfig & cfg, double duration, const ViolationConfig & violation = {})
{
  if (!(duration > 0.0)) throw std::invalid_argument{"generate_arrivals: duration must be positive"};
  if (cfg.lambda_v < 0.0 || cfg.lambda_p < 0.0) {
    throw std::invalid_argument{"generate_arrivals: arrival rates must be non-negative"};
  }
  std::vector<Spawn> out;
  const auto gen_class = [&](EntityClass cls, double lambda, std::uint64_t time_stream,
                             std::uint64_t entry_stream, std::uint64_t violator_stream,
                             int num_entries) {
    if (lambda <= 0.0) return;
    SplitMix64 times = substream(cfg.seed, time_stream);
    SplitMix64 entries = substream(cfg.seed, entry_stream);
    SplitMix64 violators = substream(cfg.seed, violator_stream);
    double unit_sum = 0.0;
    while (true) {
      unit_sum += times.next_exponential();
      const double t = unit_sum / lambda;
      if (t > duration) break;
      Spawn sp;
      sp.time = t;
      sp.cls = cls;
      sp.entry = static_cast<int>(entries.next_below(num_entries));
      if (cls == EntityClass::kVehicle) {
        sp.yields.at_intersections = !violators.next_bernoulli(violation.vehicle_intersection);
        sp.yields.at_crossings = !violators.next_bernoulli(violation.vehicle_crossing);
      } else {
        sp.yields.at_crossings = !violators.next_bernoulli(violation.pedestrian);
      }
      out.push_back(sp);
    }
  };
  gen_class(
    EntityClass::kVehicle, cfg.lambda_v, detail::kStreamVehicleTimes,
    detail::kStreamVehicleEntry, detail::kStreamVehicleViolator, kNumVehicleEntries);
  gen_class(
    EntityClass::kPedestrian, cfg.lambda_p, detail::kStreamPedestrianTimes,
    detail::kStreamPedestrianEntry, detail::kStreamPedestrianViolator, kNumPedestrianEntries);
  std::stable_sort(out.begin(), out.end(), [](const Spawn & a, const Spawn & b) {
    if (a.time != b.time) return a.time < b.time;
    return a.cls < b.cls;
  });
  return out;
}

/// Ground-truth impact: the two entities' footprints overlap at `time`.
/// One record per pair per contact episode.
struct CollisionRecord
{
  double time = 0.0;
  PairKey pair;
  PairKind kind = PairKind::kVehVeh;
  Vec2 position;
};

/// One moving entity. Vehicles are rectangles moving along a lane
/// centerline; pedestrians are discs following the pedestrian lane.
struct EntityAgent
{
  EntityId id = 0;
  EntityClass cls = EntityClass::kVehicle;
  int route_idx = 0;
  const Route * route = nullptr;
  double s = 0.0;              // arc position of the footprint center
  double speed = 0.0;          // m/s, never negative
  double applied_accel = 0.0;  // m/s^2 along heading, from the last step
  double max_speed = 0.0;
  double max_accel = 0.0;
  double max_decel = 0.0;
  YieldFlags yields;  // which priority rules this agent respects
  double spawn_time = 0.0;
  std::uint64_t spawn_step = 0;
  double half_length = 0.0, half_width = 0.0;  // vehicle footprint
  double radius = 0.0;                         // pedestrian footprint

  // Alert reaction state (closed-loop runs only).
  bool alert_active = false;
  double alert_release_time = 0.0;
  std::vector<EntityId> alert_partners;

  Vec2 position() const { return route->point_at(s); }
  double heading() const { return route->heading_at(s); }
  Vec2 direction() const
  {
    const double h = heading();
    return {std::cos(h), std::sin(h)};
  }
  Vec2 velocity_vec() const { return direction() * speed; }
  Vec2 accel_vec() const { return direction() * applied_accel; }
  OrientedBox footprint() const { return {position(), half_length, half_width, heading()}; }
  bool is_vehicle() const { return cls == EntityClass::kVehicle; }
};

struct WorldConfig
{
  ScenarioConfig scenario;
  ArrivalConfig arrivals;
  ViolationConfig violation;
  double dt = 0.01;  // s
  bool record_collisions = true;

  // Driving model constants.
  double comfort_decel = 3.5;            // m/s^2 used for gap keeping / yield planning
  double standstill_gap = 2.0;           // m bumper-to-bumper at rest
  double yield_stop_margin = 1.0;        // m back from a conflict zone edge
  double intersection_gap_margin = 2.0;  // s on top of the own clearing time
  double restart_threat_distance = 20.0; // m within which a standing queue head still blocks
  double pedestrian_gap_time = 3.0;      // s gap a yielding pedestrian demands
  double crossing_entry_margin = 1.0;    // m before a zebra within which a pedestrian blocks traffic
  double resume_clear_distance = 8.0;    // m an alert-stopped agent demands before resuming
};

/// Microscopic simulation of the scenario. Deterministic: identical
/// (config, seed) produce identical trajectories and collision records.
/// Single-threaded per instance; independent instances may run concurrently.
class World
{
public:
  explicit World(const WorldConfig & cfg)
  : cfg_(cfg), net_(RoadNetwork::build(cfg.scenario))
  {
    if (!(cfg.dt > 0.0) || cfg.dt > 0.1) {
      throw std::invalid_argument{"World: dt must be in (0, 0.1]"};
    }
    zone_routes_.resize(net_.zones.size());
    for (int k = 0; k < 2; ++k) {
      for (std::size_t r = 0; r < net_.spans[k].size(); ++r) {
        for (const ZoneSpan & span : net_.spans[k][r]) {
          zone_routes_[span.zone_id].push_back({k, static_cast<int>(r), span});
        }
      }
    }
  }

  /// Queues Poisson arrivals for [0, duration]; call before stepping.
  void load_arrivals(double duration)
  {
    for (const Spawn & sp : generate_arrivals(cfg_.arrivals, duration, cfg_.violation)) {
      pending_.push_back(sp);
    }
  }

  double now() const { return static_cast<double>(step_) * cfg_.dt; }
  std::uint64_t step_index() const { return step_; }

  /// Advances the world by one dt: spawns due arrivals, applies the driving
  /// rules, integrates motion, despawns finished routes and records
  /// ground-truth collisions.
  void step()
  {
    const std::uint64_t new_step = step_ + 1;
    const double t_new = static_cast<double>(new_step) * cfg_.dt;

    process_spawns(t_new, new_step);
    rebuild_route_lists();

    // Commands are computed from the pre-step state for every agent, then
    // applied together.
    std::vector<double> new_speed(agents_.size());
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      new_speed[i] = agents_[i].is_vehicle() ? vehicle_new_speed(agents_[i], t_new)
                                             : pedestrian_new_speed(agents_[i], t_new);
    }
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      EntityAgent & a = agents_[i];
      if (a.spawn_step == new_step) {
        a.applied_accel = 0.0;
        continue;  // exists from t_new on, moves from the next step
      }
      a.applied_accel = (new_speed[i] - a.speed) / cfg_.dt;
      a.speed = new_speed[i];
      a.s += a.speed * cfg_.dt;
    }

    step_ = new_step;
    despawn_finished();
    if (cfg_.record_collisions) detect_ground_truth();
    vehicle_count_integral_ += static_cast<double>(active_vehicles()) * cfg_.dt;
  }

  // --- fixture/spawn API -----------------------------------------------

  EntityId spawn_vehicle(
    int route_idx, double s0, double speed0, bool yielding,
    double max_speed_override = -1.0)
  {
    return spawn_vehicle(route_idx, s0, speed0, YieldFlags{yielding, yielding}, max_speed_override);
  }

  EntityId spawn_vehicle(
    int route_idx, double s0, double speed0, YieldFlags yields,
    double max_speed_override = -1.0)
  {
    EntityAgent a;
    a.id = next_id_++;
    a.cls = EntityClass::kVehicle;
    a.route_idx = route_idx;
    a.route = &net_.vehicle_routes.at(route_idx);
    a.s = s0;
    a.max_speed = max_speed_override >= 0.0 ? max_speed_override : cfg_.scenario.vehicle_max_speed;
    a.speed = std::min(speed0, a.max_speed);
    a.max_accel = cfg_.scenario.vehicle_max_accel;
    a.max_decel = cfg_.scenario.vehicle_max_decel;
    a.yields = yields;
    a.spawn_time = now();
    a.spawn_step = step_;
    a.half_length = cfg_.scenario.vehicle_length / 2.0;
    a.half_width = cfg_.scenario.vehicle_width / 2.0;
    agents_.push_back(a);
    index_[a.id] = agents_.size() - 1;
    ++spawned_;
    return a.id;
  }

  EntityId spawn_pedestrian(int route_idx, double s0, bool yielding)
  {
    return spawn_pedestrian(route_idx, s0, YieldFlags{true, yielding});
  }

  EntityId spawn_pedestrian(int route_idx, double s0, YieldFlags yields)
  {
    EntityAgent a;
    a.id = next_id_++;
    a.cls = EntityClass::kPedestrian;
    a.route_idx = route_idx;
    a.route = &net_.pedestrian_routes.at(route_idx);
    a.s = s0;
    a.speed = cfg_.scenario.pedestrian_speed;
    a.max_speed = cfg_.scenario.pedestrian_speed;
    a.max_decel = 0.0;
    a.yields = yields;
    a.spawn_time = now();
    a.spawn_step = step_;
    a.radius = cfg_.scenario.pedestrian_radius;
    agents_.push_back(a);
    index_[a.id] = agents_.size() - 1;
    ++spawned_;
    return a.id;
  }

  /// Closed-loop alert reaction: brake (vehicle) or stop (pedestrian) until
  /// `release_time` has passed and the partner is clear.
  void apply_alert_reaction(EntityId id, double release_time, EntityId partner)
  {
    auto it = index_.find(id);
    if (it == index_.end()) return;
    EntityAgent & a = agents_[it->second];
    a.alert_active = true;
    a.alert_release_time = std::max(a.alert_release_time, release_time);
    if (std::find(a.alert_partners.begin(), a.alert_partners.end(), partner) ==
        a.alert_partners.end()) {
      a.alert_partners.push_back(partner);
    }
  }

  // --- observation ------------------------------------------------------

  const std::vector<EntityAgent> & agents() const { return agents_; }

  const EntityAgent * find_agent(EntityId id) const
  {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &agents_[it->second];
  }

  const std::vector<CollisionRecord> & collisions() const { return collisions_; }

  const RoadNetwork & network() const { return net_; }
  const WorldConfig & config() const { return cfg_; }

  std::uint64_t spawned_total() const { return spawned_; }
  std::uint64_t despawned_total() const { return despawned_; }
  std::size_t active_count() const { return agents_.size(); }
  std::size_t pending_count() const { return pending_.size(); }

  std::size_t active_vehicles() const
  {
    return static_cast<std::size_t>(
      std::count_if(agents_.begin(), agents_.end(), [](const auto & a) { return a.is_vehicle(); }));
  }

  /// Time-averaged concurrent vehicle count since construction.
  double mean_vehicle_count() const
  {
    return now() > 0.0 ? vehicle_count_integral_ / now() : 0.0;
  }

private:
  struct ZoneUser
  {
    int kind;  // 0 vehicles, 1 pedestrians
    int route_idx;
    ZoneSpan span;
  };

  static double safe_speed(double dist, double decel)
  {
    return dist <= 0.0 ? 0.0 : std::sqrt(2.0 * decel * dist);
  }

  // Time to cover `dist` starting at v0, accelerating at `a` up to vmax.
  static double time_to_cover(double dist, double v0, double a, double vmax)
  {
    if (dist <= 0.0) return 0.0;
    const double t_flat = (vmax - v0) / a;
    const double d_accel = v0 * t_flat + 0.5 * a * t_flat * t_flat;
    if (d_accel >= dist) {
      return (-v0 + std::sqrt(v0 * v0 + 2.0 * a * dist)) / a;
    }
    return t_flat + (dist - d_accel) / vmax;
  }

  void process_spawns(double t_new, std::uint64_t new_step)
  {
    // Blocked spawns are delayed, not dropped; later arrivals at other
    // entries are not held back by a blocked head.
    for (auto it = pending_.begin(); it != pending_.end();) {
      if (it->time > t_new) break;  // list is time-sorted
      bool spawned = false;
      if (it->cls == EntityClass::kVehicle) {
        if (entry_clear(it->entry)) {
          const double gap = entry_gap(it->entry);
          const double v0 = std::min(
            cfg_.scenario.vehicle_max_speed,
            safe_speed(gap - cfg_.standstill_gap, cfg_.comfort_decel));
          EntityId id = spawn_vehicle(
            it->entry, cfg_.scenario.vehicle_length / 2.0, v0, it->yields);
          agents_.back().spawn_time = t_new;
          agents_.back().spawn_step = new_step;
          (void)id;
          spawned = true;
        }
      } else {
        spawn_pedestrian(it->entry, 0.0, it->yields);
        agents_.back().spawn_time = t_new;
        agents_.back().spawn_step = new_step;
        spawned = true;
      }
      if (spawned) {
        it = pending_.erase(it);
      } else {
        ++it;
      }
    }
  }

  double entry_gap(int route_idx) const
  {
    double nearest = std::numeric_limits<double>::infinity();
    for (const EntityAgent & a : agents_) {
      if (!a.is_vehicle() || a.route_idx != route_idx) continue;
      nearest = std::min(nearest, a.s - a.half_length);
    }
    return nearest - cfg_.scenario.vehicle_length;  // gap ahead of the spawn center
  }

  bool entry_clear(int route_idx) const
  {
    return entry_gap(route_idx) > cfg_.standstill_gap;
  }

  void rebuild_route_lists()
  {
    for (auto & v : vehicle_route_order_) v.clear();
    for (auto & v : pedestrian_route_order_) v.clear();
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      const EntityAgent & a = agents_[i];
      if (a.is_vehicle()) {
        vehicle_route_order_[a.route_idx].push_back(i);
      } else {
        pedestrian_route_order_[a.route_idx].push_back(i);
      }
    }
    const auto by_s = [this](std::size_t x, std::size_t y) {
      if (agents_[x].s != agents_[y].s) return agents_[x].s < agents_[y].s;
      return agents_[x].id < agents_[y].id;
    };
    for (auto & v : vehicle_route_order_) std::sort(v.begin(), v.end(), by_s);
    for (auto & v : pedestrian_route_order_) std::sort(v.begin(), v.end(), by_s);

    constexpr auto npos = std::numeric_limits<std::size_t>::max();
    leader_idx_.assign(agents_.size(), npos);
    for (const auto & order : vehicle_route_order_) {
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        leader_idx_[order[k]] = order[k + 1];
      }
    }
  }

  const EntityAgent * leader_of(const EntityAgent & a) const
  {
    const std::size_t self = index_.at(a.id);
    const std::size_t lead = leader_idx_[self];
    return lead == std::numeric_limits<std::size_t>::max() ? nullptr : &agents_[lead];
  }

  /// Iterates agents of one sorted route list whose s lies in [lo, hi].
  template <typename Fn>
  bool any_in_range(const std::vector<std::size_t> & order, double lo, double hi, Fn && pred) const
  {
    auto first = std::lower_bound(
      order.begin(), order.end(), lo,
      [this](std::size_t idx, double v) { return agents_[idx].s < v; });
    for (; first != order.end() && agents_[*first].s <= hi; ++first) {
      if (pred(agents_[*first])) return true;
    }
    return false;
  }

  bool alert_hold_done(const EntityAgent & a, double t_new) const
  {
    if (t_new < a.alert_release_time) return false;
    for (EntityId pid : a.alert_partners) {
      const EntityAgent * p = find_agent(pid);
      if (p != nullptr && distance(p->position(), a.position()) < cfg_.resume_clear_distance) {
        return false;
      }
    }
    return true;
  }

  double vehicle_new_speed(const EntityAgent & a, double t_new)
  {
    if (a.alert_active) {
      if (a.speed > 0.0) {
        return std::max(0.0, a.speed - a.max_decel * cfg_.dt);
      }
      if (!alert_hold_done(a, t_new)) return 0.0;
      // Release, fall through to the normal rules.
      auto & self = agents_[index_.at(a.id)];
      self.alert_active = false;
      self.alert_partners.clear();
    }

    double v_allow = a.max_speed;

    if (const EntityAgent * leader = leader_of(a)) {
      const double gap =
        (leader->s - leader->half_length) - (a.s + a.half_length) - cfg_.standstill_gap;
      v_allow = std::min(v_allow, safe_speed(gap, cfg_.comfort_decel));
    }

    for (const ZoneSpan & span : net_.spans[0][a.route_idx]) {
      const ConflictZone & zone = net_.zones[span.zone_id];
      const double stop_line = span.s_entry - cfg_.yield_stop_margin - a.half_length;
      // Committed once the nose is clearly inside the zone; the extra metre
      // absorbs braking overshoot past the stop line (the zone rim is not
      // swept by conflicting bodies).
      if (a.s > span.s_entry - a.half_length + 1.0) continue;
      bool must_yield = false;
      if (zone.type == ConflictZone::Type::kCrossing) {
        must_yield =
          a.yields.at_crossings && (crossing_blocked_for_vehicle(span) || exit_blocked(a, span));
      } else if (a.yields.at_intersections) {
        if (a.route_idx >= 2) {
          must_yield = intersection_blocked(a, span) || exit_blocked(a, span);
        } else {
          // Priority road: never waits for approaching side traffic, but
          // brakes for a physically occupied box.
          must_yield = intersection_occupied(a, span);
        }
      }
      if (must_yield) {
        v_allow = std::min(v_allow, safe_speed(stop_line - a.s, cfg_.comfort_decel));
      }
    }

    const double accel =
      std::clamp((v_allow - a.speed) / cfg_.dt, -a.max_decel, a.max_accel);
    return std::clamp(a.speed + accel * cfg_.dt, 0.0, a.max_speed);
  }

  double pedestrian_new_speed(const EntityAgent & a, double t_new)
  {
    if (a.alert_active) {
      if (!alert_hold_done(a, t_new)) return 0.0;
      auto & self = agents_[index_.at(a.id)];
      self.alert_active = false;
      self.alert_partners.clear();
    }
    if (a.yields.at_crossings) {
      for (const ZoneSpan & span : net_.spans[1][a.route_idx]) {
        const double stop_line = span.s_entry - 0.5;
        if (a.s >= stop_line - 0.1 && a.s < span.s_entry && crossing_blocked_for_pedestrian(span)) {
          return 0.0;  // wait at the kerb
        }
      }
    }
    return a.max_speed;
  }

  /// A zebra is blocked for vehicles while any pedestrian is on it or within
  /// the entry margin of stepping onto it.
  bool crossing_blocked_for_vehicle(const ZoneSpan & vehicle_span)
  {
    for (const ZoneUser & user : zone_routes_[vehicle_span.zone_id]) {
      if (user.kind != 1) continue;
      if (any_in_range(
            pedestrian_route_order_[user.route_idx],
            user.span.s_entry - cfg_.crossing_entry_margin, user.span.s_exit,
            [](const EntityAgent &) { return true; })) {
        return true;
      }
    }
    return false;
  }

  /// An unregulated intersection is blocked for a yielding side-road vehicle
  /// while a main-road vehicle occupies it, stands close enough to restart
  /// into it, or arrives within the gap the vehicle needs to clear the box
  /// itself (tail past the exit) plus a margin.
  bool intersection_blocked(const EntityAgent & me, const ZoneSpan & my_span)
  {
    const double vmax = cfg_.scenario.vehicle_max_speed;
    const double half = cfg_.scenario.vehicle_length / 2.0;
    // Horizon from the current position: approach + crossing time + margin.
    // Evaluating from afar makes threats visible while stopping at the line
    // is still within comfort_decel reach. A leader hanging around beyond
    // the exit caps the achievable crossing speed, so the estimate must not
    // assume free acceleration then.
    const double clear_dist = my_span.s_exit + me.half_length - me.s;
    double crossing_vmax = me.max_speed;
    if (const EntityAgent * leader = leader_of(me)) {
      if (leader->s - leader->half_length < my_span.s_exit + 30.0) {
        crossing_vmax = std::min(crossing_vmax, std::max(leader->speed, 1.0));
      }
    }
    const double demanded_gap =
      time_to_cover(clear_dist, me.speed, me.max_accel, crossing_vmax) +
      cfg_.intersection_gap_margin;
    for (const ZoneUser & user : zone_routes_[my_span.zone_id]) {
      if (user.kind != 0 || user.route_idx == me.route_idx) continue;
      if (user.route_idx >= 2) continue;  // only the priority (main) road conflicts
      const double lo = user.span.s_entry - (demanded_gap + 1.0) * vmax - half;
      const double hi = user.span.s_exit + half;
      const bool threat = any_in_range(
        vehicle_route_order_[user.route_idx], lo, hi, [&](const EntityAgent & v) {
          const bool inside =
            v.s + v.half_length > user.span.s_entry && v.s - v.half_length < user.span.s_exit;
          if (inside) return true;
          if (v.s >= user.span.s_entry) return false;  // already past
          const double dist = user.span.s_entry - (v.s + v.half_length);
          // A queue head this close can restart into the box while we cross.
          if (dist <= cfg_.restart_threat_distance) return true;
          return v.speed > 0.5 && dist / v.speed <= demanded_gap;
        });
      if (threat) return true;
    }
    return false;
  }

  /// Conflicting traffic stuck inside an intersection box: stalled, or
  /// braking toward a stop that stays inside it. The priority road brakes
  /// for such obstructions and for nothing else; a crosser moving through
  /// cleanly is not anticipated.
  bool intersection_occupied(const EntityAgent & me, const ZoneSpan & my_span)
  {
    const double half = cfg_.scenario.vehicle_length / 2.0;
    for (const ZoneUser & user : zone_routes_[my_span.zone_id]) {
      if (user.kind != 0 || user.route_idx == me.route_idx) continue;
      const bool occupied = any_in_range(
        vehicle_route_order_[user.route_idx], user.span.s_entry - half, user.span.s_exit + half,
        [&](const EntityAgent & v) {
          const bool inside =
            v.s + v.half_length > user.span.s_entry && v.s - v.half_length < user.span.s_exit;
          if (!inside) return false;
          if (v.speed < 3.0) return true;
          if (v.applied_accel < -0.5) {
            const double stop_s = v.s + v.speed * v.speed / (2.0 * -v.applied_accel);
            return stop_s - v.half_length < user.span.s_exit;  // will strand inside
          }
          return false;
        });
      if (occupied) return true;
    }
    return false;
  }

  /// No stopping inside a conflict zone: entry is refused while the leader,
  /// if it braked comfortably from its current speed, could come to rest
  /// without leaving room for this vehicle beyond the exit.
  bool exit_blocked(const EntityAgent & me, const ZoneSpan & my_span) const
  {
    const EntityAgent * leader = leader_of(me);
    if (leader == nullptr) return false;
    const double needed_exit = my_span.s_exit + me.half_length * 2.0 + cfg_.standstill_gap;
    const double projected_rear = (leader->s - leader->half_length) +
                                  leader->speed * leader->speed / (2.0 * cfg_.comfort_decel);
    return projected_rear < needed_exit;
  }

  /// A zebra is blocked for a yielding pedestrian while a vehicle occupies it
  /// or approaches fast within the demanded time gap.
  bool crossing_blocked_for_pedestrian(const ZoneSpan & ped_span)
  {
    const double vmax = cfg_.scenario.vehicle_max_speed;
    const double half = cfg_.scenario.vehicle_length / 2.0;
    for (const ZoneUser & user : zone_routes_[ped_span.zone_id]) {
      if (user.kind != 0) continue;
      const double lo = user.span.s_entry - cfg_.pedestrian_gap_time * vmax - half;
      const double hi = user.span.s_exit + half;
      // The walking line runs through the zone center along the vehicle
      // axis; only vehicles overlapping that line physically bar the way.
      const double mid = 0.5 * (user.span.s_entry + user.span.s_exit);
      const bool threat = any_in_range(
        vehicle_route_order_[user.route_idx], lo, hi, [&](const EntityAgent & v) {
          if (v.s + v.half_length > mid - 1.0 && v.s - v.half_length < mid + 1.0) {
            return true;  // never step out in front of a vehicle on the line
          }
          if (v.s + v.half_length <= user.span.s_entry && v.speed > 0.5) {
            return (user.span.s_entry - v.s - v.half_length) / v.speed <= cfg_.pedestrian_gap_time;
          }
          return false;
        });
      if (threat) return true;
    }
    return false;
  }

  void despawn_finished()
  {
    bool removed = false;
    for (auto it = agents_.begin(); it != agents_.end();) {
      if (it->s >= it->route->length()) {
        active_contacts_.erase_id(it->id);
        it = agents_.erase(it);
        ++despawned_;
        removed = true;
      } else {
        ++it;
      }
    }
    if (removed) reindex();
  }

  void reindex()
  {
    index_.clear();
    for (std::size_t i = 0; i < agents_.size(); ++i) index_[agents_[i].id] = i;
  }

  void detect_ground_truth()
  {
    const double t = now();
    std::set<PairKey> overlapping;
    const double cull = 2.0 * cfg_.scenario.vehicle_length + 2.0;
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      for (std::size_t j = i + 1; j < agents_.size(); ++j) {
        const EntityAgent & a = agents_[i];
        const EntityAgent & b = agents_[j];
        if (!a.is_vehicle() && !b.is_vehicle()) continue;  // pedestrian pairs not tracked
        const Vec2 pa = a.position();
        const Vec2 pb = b.position();
        if (std::abs(pa.x - pb.x) > cull || std::abs(pa.y - pb.y) > cull) continue;
        bool hit = false;
        if (a.is_vehicle() && b.is_vehicle()) {
          hit = overlap(a.footprint(), b.footprint());
        } else {
          const EntityAgent & veh = a.is_vehicle() ? a : b;
          const EntityAgent & ped = a.is_vehicle() ? b : a;
          hit = overlap(veh.footprint(), ped.position(), ped.radius);
        }
        if (!hit) continue;
        const PairKey key{a.id, b.id};
        overlapping.insert(key);
        if (!active_contacts_.contains(key)) {
          collisions_.push_back(
            {t, key, pair_kind_of(a.cls, b.cls), (pa + pb) * 0.5});
        }
      }
    }
    active_contacts_.replace(std::move(overlapping));
  }

  // Current contact episodes, so continuous overlap yields a single record.
  struct ContactSet
  {
    std::set<PairKey> pairs;
    bool contains(const PairKey & k) const { return pairs.count(k) > 0; }
    void replace(std::set<PairKey> && next) { pairs = std::move(next); }
    void erase_id(EntityId id)
    {
      for (auto it = pairs.begin(); it != pairs.end();) {
        it = it->contains(id) ? pairs.erase(it) : std::next(it);
      }
    }
  };

  WorldConfig cfg_;
  RoadNetwork net_;
  std::vector<std::vector<ZoneUser>> zone_routes_;
  std::vector<EntityAgent> agents_;
  std::vector<std::size_t> leader_idx_;
  std::unordered_map<EntityId, std::size_t> index_;
  std::deque<Spawn> pending_;
  std::vector<CollisionRecord> collisions_;
  ContactSet active_contacts_;
  std::array<std::vector<std::size_t>, kNumVehicleEntries> vehicle_route_order_{};
  std::array<std::vector<std::size_t>, kNumPedestrianEntries> pedestrian_route_order_{};
  EntityId next_id_ = 1;
  std::uint64_t step_ = 0;
  std::uint64_t spawned_ = 0;
  std::uint64_t despawned_ = 0;
  double vehicle_count_integral_ = 0.0;
};

/// One cell of the arrival-rate stability study.
struct StabilityRow
{
  double lambda_v = 0.0;
  double lambda_p = 0.0;
  double mean_vehicle_count = 0.0;  // over seeds, of the per-run time average
  double ci95 = 0.0;
};

/// Runs seeded simulations over the (lambda_v, lambda_p) grid and reports the
/// time-averaged concurrent vehicle count per cell. Cells run concurrently;
/// output order is deterministic (row-major over the grids).
inline std::vector<StabilityRow> stability_sweep(
  const ScenarioConfig & scenario, const std::vector<double> & lambda_v_grid,
  const std::vector<double> & lambda_p_grid, double duration,
  const std::vector<std::uint64_t> & seeds, const ViolationConfig & violation = {})
{
  if (lambda_v_grid.empty() || lambda_p_grid.empty() || seeds.empty()) {
    throw std::invalid_argument{"stability_sweep: grids and seeds must be non-empty"};
  }
  struct Cell
  {
    double lv, lp;
  };
  std::vector<Cell> cells;
  for (double lp : lambda_p_grid) {
    for (double lv : lambda_v_grid) {
      cells.push_back({lv, lp});
    }
  }
  std::vector<std::future<StabilityRow>> futures;
  futures.reserve(cells.size());
  for (const Cell & cell : cells) {
    futures.push_back(std::async(std::launch::async, [=]() {
      std::vector<double> means;
      for (std::uint64_t seed : seeds) {
        WorldConfig wc;
        wc.scenario = scenario;
        wc.arrivals = {cell.lv, cell.lp, seed};
        wc.violation = violation;
        wc.record_collisions = false;
        World world(wc);
        world.load_arrivals(duration);
        const auto steps = static_cast<std::uint64_t>(std::llround(duration / wc.dt));
        for (std::uint64_t i = 0; i < steps; ++i) world.step();
        means.push_back(world.mean_vehicle_count());
      }
      double mean = 0.0;
      for (double m : means) mean += m;
      mean /= static_cast<double>(means.size());
      double var = 0.0;
      for (double m : means) var += (m - mean) * (m - mean);
      const auto n = static_cast<double>(means.size());
      const double ci = n > 1 ? 1.96 * std::sqrt(var / (n - 1) / n) : 0.0;
      return StabilityRow{cell.lv, cell.lp, mean, ci};
    }));
  }
  std::vector<StabilityRow> rows;
  rows.reserve(cells.size());
  for (auto & f : futures) rows.push_back(f.get());
  return rows;
}

}  // namespace cavsim
