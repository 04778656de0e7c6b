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
#include "cavsim/kvfile.hpp"
#include "cavsim/logs.hpp"
#include "cavsim/mobility.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavsim
{

/// One-way transport delays between an entity and the detection server.
/// Both CAM uplink and alert downlink traverse the radio leg and the
/// backhaul leg, so moving the server farther away also shifts detection
/// times, not just alert delivery.
struct LatencyProfile
{
  double backhaul_latency = 0.005;  // s, eNB <-> server
  double radio_latency = 0.010;     // s, entity <-> eNB

  static LatencyProfile metro() { return {0.005, 0.010}; }
  static LatencyProfile cloud() { return {0.020, 0.010}; }

  static LatencyProfile by_name(const std::string & name)
  {
    if (name == "metro") return metro();
    if (name == "cloud") return cloud();
    throw ConfigError{"unknown latency profile: '" + name + "' (expected metro or cloud)"};
  }
};

/// Receiver-side alert handling: on-board processing plus the human reaction
/// gap (zero for automated vehicles).
struct ReactionProfile
{
  double processing_time = 0.4;  // s, first bit received -> driver notified
  double human_reaction = 1.0;   // s, notification -> evasive action starts

  static ReactionProfile human_driver() { return {0.4, 1.0}; }
  static ReactionProfile automated() { return {0.4, 0.0}; }

  static ReactionProfile by_name(const std::string & name)
  {
    if (name == "human" || name == "hd") return human_driver();
    if (name == "automated" || name == "av") return automated();
    throw ConfigError{"unknown reaction profile: '" + name + "' (expected human or automated)"};
  }
};

/// Server delivery time of a CAM generated at `generated_at`.
inline double cam_delivery_time(double generated_at, const LatencyProfile & latency)
{
  return generated_at + latency.radio_latency + latency.backhaul_latency;
}

/// Per-recipient timing of an alert: when it reaches the HMI and when the
/// evasive action starts. hmi_time - issued_at is the transmission plus
/// processing delay (T_D); action_time adds the reaction gap (T_H).
struct AlertTiming
{
  double hmi_time = 0.0;
  double action_time = 0.0;
};

inline AlertTiming alert_timing(
  double issued_at, const LatencyProfile & latency, const ReactionProfile & reaction)
{
  const double hmi =
    issued_at + latency.backhaul_latency + latency.radio_latency + reaction.processing_time;
  return {hmi, hmi + reaction.human_reaction};
}

/// Time-ordered pending deliveries; ties dispatch in insertion (FIFO) order.
class EventQueue
{
public:
  struct Event
  {
    double time = 0.0;
    std::uint64_t seq = 0;
    enum class Kind { kCamDelivery, kAlertAction } kind = Kind::kCamDelivery;
    Cam cam;                 // kCamDelivery
    EntityId recipient = 0;  // kAlertAction
    EntityId partner = 0;    // kAlertAction
  };

  void push_cam(double time, const Cam & cam)
  {
    Event e;
    e.time = time;
    e.seq = next_seq_++;
    e.kind = Event::Kind::kCamDelivery;
    e.cam = cam;
    heap_.push(e);
  }

  void push_alert_action(double time, EntityId recipient, EntityId partner)
  {
    Event e;
    e.time = time;
    e.seq = next_seq_++;
    e.kind = Event::Kind::kAlertAction;
    e.recipient = recipient;
    e.partner = partner;
    heap_.push(e);
  }

  bool empty() const { return heap_.empty(); }
  const Event & top() const { return heap_.top(); }
  Event pop()
  {
    Event e = heap_.top();
    heap_.pop();
    return e;
  }

private:
  struct Later
  {
    bool operator()(const Event & a, const Event & b) const
    {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

/// Options of one coupled run.
///
/// closed_loop selects whether delivered alerts feed back into mobility
/// (recipients brake/stop at action_time). The survey-style batches leave it
/// off: alerts are logged and the outcome classification happens offline, so
/// reaction profiles can be compared on identical collision sets.
struct CoupledRunOptions
{
  bool alerts_enabled = true;
  bool closed_loop = false;
  int trajectory_decimation = 10;  // steps between samples, per entity
  double alert_hold_grace = 2.0;   // s an alerted agent stays stopped after acting

  // Optional hook to place fixture agents before the loop starts.
  std::function<void(World &)> setup_world;
};

struct RunLogs
{
  std::vector<TrajectorySample> trajectory;
  std::vector<CollisionRecord> collisions;
  std::vector<AlertRow> alerts;
};

namespace detail
{

inline TrajectorySample sample_of(const EntityAgent & a, double t)
{
  const Vec2 p = a.position();
  return {t, a.id, a.cls, p.x, p.y, a.speed, a.heading(), a.applied_accel};
}

}  // namespace detail

/// Single event loop coupling mobility, CAM transport, server-side detection
/// and (optionally) alert reactions. Deterministic: one thread per run, FIFO
/// tie-breaking, per-entity CAM clocks anchored at spawn.
inline RunLogs run_coupled(
  const WorldConfig & world_cfg, const DetectorParams & params, const LatencyProfile & latency,
  const ReactionProfile & reaction, double duration, const CoupledRunOptions & options = {})
{
  if (!(duration > 0.0)) throw std::invalid_argument{"run_coupled: duration must be positive"};
  params.validate();
  if (options.trajectory_decimation <= 0) {
    throw std::invalid_argument{"run_coupled: trajectory_decimation must be positive"};
  }

  World world(world_cfg);
  world.load_arrivals(duration);
  if (options.setup_world) options.setup_world(world);
  const double cell = world_cfg.scenario.vehicle_max_speed * params.vehicle.t2c_t;
  Detector detector(params, cell > 0 ? cell : 140.0);
  EventQueue queue;
  RunLogs logs;

  const auto cam_period_steps = static_cast<std::uint64_t>(
    std::llround(1.0 / (params.cam_frequency_hz * world_cfg.dt)));
  if (cam_period_steps == 0) {
    throw std::invalid_argument{"run_coupled: CAM frequency above the step rate"};
  }
  const auto log_period_steps = static_cast<std::uint64_t>(options.trajectory_decimation);
  const auto total_steps = static_cast<std::uint64_t>(std::llround(duration / world_cfg.dt));

  std::size_t collisions_seen = 0;
  for (std::uint64_t i = 0; i < total_steps; ++i) {
    world.step();
    const double t = world.now();
    const std::uint64_t step = world.step_index();

    // Sample + emit per entity on its own clock. Entities are visited in id
    // order, so same-time deliveries dequeue deterministically.
    for (const EntityAgent & a : world.agents()) {
      const std::uint64_t age_steps = step - a.spawn_step;
      if (age_steps % log_period_steps == 0) {
        logs.trajectory.push_back(detail::sample_of(a, t));
      }
      if (options.alerts_enabled && age_steps % cam_period_steps == 0) {
        // Build the CAM through the trajectory-sample representation so the
        // offline replay path sees bit-identical state.
        queue.push_cam(
          cam_delivery_time(t, latency), cam_from_sample(detail::sample_of(a, t)));
      }
    }

    while (!queue.empty() && queue.top().time <= t) {
      const EventQueue::Event ev = queue.pop();
      if (ev.kind == EventQueue::Event::Kind::kCamDelivery) {
        for (const Alert & alert : detector.on_cam(ev.cam, ev.time)) {
          logs.alerts.push_back(to_row(alert));
          if (options.closed_loop) {
            const AlertTiming timing = alert_timing(alert.issued_at, latency, reaction);
            queue.push_alert_action(timing.action_time, alert.pair.a, alert.pair.b);
            queue.push_alert_action(timing.action_time, alert.pair.b, alert.pair.a);
          }
        }
      } else {
        world.apply_alert_reaction(
          ev.recipient, ev.time + options.alert_hold_grace, ev.partner);
      }
    }

    for (; collisions_seen < world.collisions().size(); ++collisions_seen) {
      logs.collisions.push_back(world.collisions()[collisions_seen]);
    }
  }
  return logs;
}

}  // namespace cavsim
