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
#include "cavsim/geometry.hpp"
#include "cavsim/logs.hpp"
#include "cavsim/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavsim
{

struct AnalysisError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

/// Outcome of a ground-truth collision, from the receiver's point of view.
enum class OutcomeClass { kDetectedInTime, kDetectedTooLate, kNotDetected };

/// Quality class of a sent alert.
enum class AlertClass { kTrueTimely, kTrueLate, kFalsePositive };

inline std::string to_string(OutcomeClass c)
{
  switch (c) {
    case OutcomeClass::kDetectedInTime:
      return "detected_in_time";
    case OutcomeClass::kDetectedTooLate:
      return "detected_too_late";
    default:
      return "not_detected";
  }
}

inline std::string to_string(AlertClass c)
{
  switch (c) {
    case AlertClass::kTrueTimely:
      return "true_timely";
    case AlertClass::kTrueLate:
      return "true_late";
    default:
      return "false_positive";
  }
}

/// Time budget of one classified collision:
///   t_a = t_fa - t_d - t_h   (time left to act once the driver can react)
///   t_b = speed at notification / max deceleration (time needed to stop).
struct ReactionBudget
{
  double t_fa = 0.0;
  double t_d = 0.0;
  double t_h = 0.0;
  double t_a = 0.0;
  double t_b = 0.0;
};

/// Footprint dimensions used to turn logged centers into shapes.
struct FootprintSpec
{
  double vehicle_half_length = 2.5;
  double vehicle_half_width = 0.9;
  double pedestrian_radius = 0.3;

  static FootprintSpec from_scenario(const ScenarioConfig & s)
  {
    return {s.vehicle_length / 2.0, s.vehicle_width / 2.0, s.pedestrian_radius};
  }
};

/// Per-entity view of a trajectory log, sorted by time.
class TrajectoryIndex
{
public:
  explicit TrajectoryIndex(const std::vector<TrajectorySample> & samples)
  {
    for (const TrajectorySample & s : samples) by_id_[s.id].push_back(s);
    for (auto & [id, v] : by_id_) {
      std::sort(v.begin(), v.end(), [](const auto & a, const auto & b) { return a.time < b.time; });
    }
  }

  bool has(EntityId id) const { return by_id_.count(id) > 0; }

  const std::vector<TrajectorySample> & samples(EntityId id) const
  {
    auto it = by_id_.find(id);
    if (it == by_id_.end() || it->second.empty()) {
      throw AnalysisError{"no trajectory data for entity " + std::to_string(id)};
    }
    return it->second;
  }

  EntityClass class_of(EntityId id) const { return samples(id).front().cls; }
  double first_time(EntityId id) const { return samples(id).front().time; }
  double last_time(EntityId id) const { return samples(id).back().time; }

  /// Sample nearest in time to t (ties: the earlier one). t outside the
  /// entity's lifetime clamps to the first/last sample.
  const TrajectorySample & at_time(EntityId id, double t) const
  {
    const auto & v = samples(id);
    auto it = std::lower_bound(
      v.begin(), v.end(), t,
      [](const TrajectorySample & s, double tt) { return s.time < tt; });
    if (it == v.end()) return v.back();
    if (it == v.begin()) return v.front();
    const auto prev = std::prev(it);
    return (t - prev->time <= it->time - t) ? *prev : *it;
  }

  /// Position linearly interpolated between samples (clamped outside).
  Vec2 position_at(EntityId id, double t) const
  {
    const auto & v = samples(id);
    auto it = std::lower_bound(
      v.begin(), v.end(), t,
      [](const TrajectorySample & s, double tt) { return s.time < tt; });
    if (it == v.end()) return {v.back().x, v.back().y};
    if (it == v.begin()) return {v.front().x, v.front().y};
    const auto prev = std::prev(it);
    const double span = it->time - prev->time;
    const double w = span > 0 ? (t - prev->time) / span : 0.0;
    return {prev->x + w * (it->x - prev->x), prev->y + w * (it->y - prev->y)};
  }

  std::vector<EntityId> ids() const
  {
    std::vector<EntityId> out;
    out.reserve(by_id_.size());
    for (const auto & [id, v] : by_id_) out.push_back(id);
    return out;
  }

private:
  std::map<EntityId, std::vector<TrajectorySample>> by_id_;
};

struct CollisionOutcome
{
  CollisionRecord col;
  OutcomeClass outcome = OutcomeClass::kNotDetected;
  std::optional<ReactionBudget> budget;  // set when an alert preceded the impact
};

namespace detail
{

/// Stopping time of one pair member at notification time: vehicles need
/// speed / max_decel, pedestrians stop almost instantaneously (0).
inline double member_stop_time(
  EntityId id, const TrajectoryIndex & traj, double hmi_time, double max_decel)
{
  if (traj.class_of(id) == EntityClass::kPedestrian) return 0.0;
  return traj.at_time(id, hmi_time).speed / max_decel;
}

}  // namespace detail

/// Classifies one ground-truth collision against the alerts sent for its
/// pair. With no alert strictly before the impact the collision is
/// NotDetected. Otherwise the budget is evaluated from the first alert:
/// detected too late iff t_a < t_b, where t_b is the smallest stopping time
/// over the pair (braking by either member prevents the overlap).
/// Missing trajectory data raises AnalysisError instead of guessing.
inline CollisionOutcome classify_collision(
  const CollisionRecord & col, const std::vector<AlertRow> & pair_alerts,
  const ReactionProfile & reaction, const LatencyProfile & latency, const TrajectoryIndex & traj,
  double max_decel)
{
  const AlertRow * first = nullptr;
  for (const AlertRow & a : pair_alerts) {
    if (a.pair() == col.pair && a.issued_at < col.time && (first == nullptr || a.issued_at < first->issued_at)) {
      first = &a;
    }
  }
  if (first == nullptr) {
    return {col, OutcomeClass::kNotDetected, std::nullopt};
  }
  ReactionBudget b;
  b.t_fa = col.time - first->issued_at;
  b.t_d = latency.backhaul_latency + latency.radio_latency + reaction.processing_time;
  b.t_h = reaction.human_reaction;
  b.t_a = b.t_fa - b.t_d - b.t_h;
  const double hmi = first->issued_at + b.t_d;
  b.t_b = std::min(
    detail::member_stop_time(col.pair.a, traj, hmi, max_decel),
    detail::member_stop_time(col.pair.b, traj, hmi, max_decel));
  const OutcomeClass out =
    b.t_a < b.t_b ? OutcomeClass::kDetectedTooLate : OutcomeClass::kDetectedInTime;
  return {col, out, b};
}

/// Classifies every collision of a run. Collisions whose pair lacks
/// trajectory coverage land in the `uncoverable` list instead of a class.
struct ClassifiedCollisions
{
  std::vector<CollisionOutcome> outcomes;
  std::vector<CollisionRecord> uncoverable;
};

inline ClassifiedCollisions classify_collisions(
  const std::vector<CollisionRecord> & collisions, const std::vector<AlertRow> & alerts,
  const ReactionProfile & reaction, const LatencyProfile & latency, const TrajectoryIndex & traj,
  double max_decel)
{
  std::map<PairKey, std::vector<AlertRow>> by_pair;
  for (const AlertRow & a : alerts) by_pair[a.pair()].push_back(a);

  ClassifiedCollisions out;
  static const std::vector<AlertRow> kNone;
  for (const CollisionRecord & col : collisions) {
    auto it = by_pair.find(col.pair);
    try {
      out.outcomes.push_back(classify_collision(
        col, it == by_pair.end() ? kNone : it->second, reaction, latency, traj, max_decel));
    } catch (const AnalysisError &) {
      out.uncoverable.push_back(col);
    }
  }
  return out;
}

/// An alert is a true positive iff its pair actually collides within the
/// governing time-to-collision horizon after issuance; true positives
/// inherit timely/late from the collision's classification. Everything else
/// is a false positive.
inline std::vector<AlertClass> classify_alerts(
  const std::vector<AlertRow> & alerts, const ClassifiedCollisions & classified,
  const DetectorParams & params)
{
  std::map<PairKey, std::vector<const CollisionOutcome *>> cols_by_pair;
  for (const CollisionOutcome & co : classified.outcomes) {
    cols_by_pair[co.col.pair].push_back(&co);
  }
  for (auto & [pair, v] : cols_by_pair) {
    std::sort(v.begin(), v.end(), [](const auto * a, const auto * b) {
      return a->col.time < b->col.time;
    });
  }

  std::vector<AlertClass> out;
  out.reserve(alerts.size());
  for (const AlertRow & a : alerts) {
    const double horizon =
      (a.kind == PairKind::kVehVeh ? params.vehicle : params.pedestrian).t2c_t;
    const CollisionOutcome * match = nullptr;
    auto it = cols_by_pair.find(a.pair());
    if (it != cols_by_pair.end()) {
      for (const CollisionOutcome * co : it->second) {
        if (co->col.time >= a.issued_at && co->col.time <= a.issued_at + horizon) {
          match = co;
          break;
        }
      }
    }
    if (match == nullptr) {
      out.push_back(AlertClass::kFalsePositive);
    } else {
      out.push_back(
        match->outcome == OutcomeClass::kDetectedInTime ? AlertClass::kTrueTimely
                                                        : AlertClass::kTrueLate);
    }
  }
  return out;
}

/// Pairs that received at least one alert but never actually collided
/// (the population whose closeness the false-positive CDF describes).
inline std::set<PairKey> false_positive_pairs(
  const std::vector<AlertRow> & alerts, const std::vector<CollisionRecord> & collisions,
  std::optional<PairKind> kind_filter = std::nullopt)
{
  std::set<PairKey> collided;
  for (const CollisionRecord & c : collisions) collided.insert(c.pair);
  std::set<PairKey> out;
  for (const AlertRow & a : alerts) {
    if (kind_filter && a.kind != *kind_filter) continue;
    if (!collided.count(a.pair())) out.insert(a.pair());
  }
  return out;
}

struct CdfPoint
{
  double value = 0.0;
  double cum_fraction = 0.0;
};

/// Minimum footprint-to-footprint distance reached by each pair over their
/// co-existence window, evaluated on the union of both entities' sample
/// grids with linear interpolation in between. Returns the sorted CDF.
inline std::vector<CdfPoint> fp_min_distance_cdf(
  const std::set<PairKey> & pairs, const TrajectoryIndex & traj, const FootprintSpec & foot)
{
  std::vector<double> mins;
  for (const PairKey & pair : pairs) {
    const double t0 = std::max(traj.first_time(pair.a), traj.first_time(pair.b));
    const double t1 = std::min(traj.last_time(pair.a), traj.last_time(pair.b));
    if (t1 < t0) continue;  // never co-existed in the log

    std::vector<double> times;
    for (const TrajectorySample & s : traj.samples(pair.a)) {
      if (s.time >= t0 && s.time <= t1) times.push_back(s.time);
    }
    for (const TrajectorySample & s : traj.samples(pair.b)) {
      if (s.time >= t0 && s.time <= t1) times.push_back(s.time);
    }
    std::sort(times.begin(), times.end());

    double best = std::numeric_limits<double>::infinity();
    for (double t : times) {
      const TrajectorySample & sa = traj.at_time(pair.a, t);
      const TrajectorySample & sb = traj.at_time(pair.b, t);
      const Vec2 pa = traj.position_at(pair.a, t);
      const Vec2 pb = traj.position_at(pair.b, t);
      double d = 0.0;
      if (sa.cls == EntityClass::kVehicle && sb.cls == EntityClass::kVehicle) {
        const OrientedBox ba{pa, foot.vehicle_half_length, foot.vehicle_half_width, sa.heading};
        const OrientedBox bb{pb, foot.vehicle_half_length, foot.vehicle_half_width, sb.heading};
        d = separation(ba, bb);
      } else {
        const bool a_is_vehicle = sa.cls == EntityClass::kVehicle;
        const TrajectorySample & sv = a_is_vehicle ? sa : sb;
        const Vec2 pv = a_is_vehicle ? pa : pb;
        const Vec2 pp = a_is_vehicle ? pb : pa;
        const OrientedBox bv{pv, foot.vehicle_half_length, foot.vehicle_half_width, sv.heading};
        d = separation(bv, pp, foot.pedestrian_radius);
      }
      best = std::min(best, d);
      if (best == 0.0) break;
    }
    if (std::isfinite(best)) mins.push_back(best);
  }
  std::sort(mins.begin(), mins.end());
  std::vector<CdfPoint> cdf;
  cdf.reserve(mins.size());
  for (std::size_t i = 0; i < mins.size(); ++i) {
    cdf.push_back({mins[i], static_cast<double>(i + 1) / static_cast<double>(mins.size())});
  }
  return cdf;
}

/// Feeds recorded trajectory samples through the server-side detection path
/// exactly as the live run would have seen them (same CAM construction, same
/// delivery times, same ordering). With the original parameters this
/// reproduces the live alert log of an open-loop run row for row.
inline std::vector<AlertRow> replay_detection(
  std::vector<TrajectorySample> samples, const DetectorParams & params,
  const LatencyProfile & latency)
{
  std::sort(samples.begin(), samples.end(), [](const auto & a, const auto & b) {
    if (a.time != b.time) return a.time < b.time;
    return a.id < b.id;
  });
  const double cell = 20.0 * std::max(params.vehicle.t2c_t, params.pedestrian.t2c_t);
  Detector detector(params, std::max(cell, 10.0));
  std::vector<AlertRow> alerts;
  for (const TrajectorySample & s : samples) {
    const Cam cam = cam_from_sample(s);
    for (const Alert & alert : detector.on_cam(cam, cam_delivery_time(s.time, latency))) {
      alerts.push_back(to_row(alert));
    }
  }
  return alerts;
}

// ---------------------------------------------------------------------------
// Threshold sensitivity sweep (replay mode).

struct SweepCell
{
  double t2c = 0.0;
  double s2c = 0.0;
  // Per pair kind: distinct alerted pairs, share of collisions undetected or
  // detected too late, share of alerts that are false positives. Percentages
  // are NaN when the denominator is zero.
  int alerted_pairs_vv = 0;
  int alerted_pairs_vp = 0;
  int not_detected_vv = 0;
  int not_detected_vp = 0;
  double undetected_or_late_pct_vv = 0.0;
  double undetected_or_late_pct_vp = 0.0;
  double fp_pct_vv = 0.0;
  double fp_pct_vp = 0.0;
};

struct SweepResult
{
  std::vector<double> t2c_grid;
  std::vector<double> s2c_grid;
  std::vector<SweepCell> cells;  // row-major: t2c outer, s2c inner

  const SweepCell & at(std::size_t i_t2c, std::size_t i_s2c) const
  {
    return cells[i_t2c * s2c_grid.size() + i_s2c];
  }
};

/// Re-runs detection offline over the recorded trajectories for every
/// (t2c_t, s2c_t) cell — both entity classes take the cell's values — and
/// classifies outcomes and alerts against the recorded collisions. All cells
/// see identical mobility, which is the point of replay mode; closed-loop
/// braking is deliberately excluded here.
inline SweepResult threshold_sweep(
  const std::vector<TrajectorySample> & samples, const std::vector<CollisionRecord> & collisions,
  const std::vector<double> & t2c_grid, const std::vector<double> & s2c_grid,
  const ReactionProfile & reaction, const LatencyProfile & latency,
  const DetectorParams & base_params, double max_decel)
{
  if (t2c_grid.empty() || s2c_grid.empty()) {
    throw std::invalid_argument{"threshold_sweep: grids must be non-empty"};
  }
  SweepResult result;
  result.t2c_grid = t2c_grid;
  result.s2c_grid = s2c_grid;

  const TrajectoryIndex traj(samples);

  std::vector<std::future<SweepCell>> futures;
  for (double t2c : t2c_grid) {
    for (double s2c : s2c_grid) {
      futures.push_back(std::async(std::launch::async, [&, t2c, s2c]() {
        DetectorParams params = base_params;
        params.vehicle = {t2c, s2c};
        params.pedestrian = {t2c, s2c};
        const auto alerts = replay_detection(samples, params, latency);
        const auto classified =
          classify_collisions(collisions, alerts, reaction, latency, traj, max_decel);
        const auto alert_classes = classify_alerts(alerts, classified, params);

        SweepCell cell;
        cell.t2c = t2c;
        cell.s2c = s2c;
        std::set<PairKey> pairs_vv, pairs_vp;
        int fp_vv = 0, fp_vp = 0, n_alerts_vv = 0, n_alerts_vp = 0;
        for (std::size_t i = 0; i < alerts.size(); ++i) {
          const bool vv = alerts[i].kind == PairKind::kVehVeh;
          (vv ? pairs_vv : pairs_vp).insert(alerts[i].pair());
          (vv ? n_alerts_vv : n_alerts_vp) += 1;
          if (alert_classes[i] == AlertClass::kFalsePositive) (vv ? fp_vv : fp_vp) += 1;
        }
        cell.alerted_pairs_vv = static_cast<int>(pairs_vv.size());
        cell.alerted_pairs_vp = static_cast<int>(pairs_vp.size());

        int bad_vv = 0, bad_vp = 0, n_col_vv = 0, n_col_vp = 0;
        for (const CollisionOutcome & co : classified.outcomes) {
          const bool vv = co.col.kind == PairKind::kVehVeh;
          (vv ? n_col_vv : n_col_vp) += 1;
          if (co.outcome != OutcomeClass::kDetectedInTime) (vv ? bad_vv : bad_vp) += 1;
          if (co.outcome == OutcomeClass::kNotDetected) {
            (vv ? cell.not_detected_vv : cell.not_detected_vp) += 1;
          }
        }
        const auto pct = [](int num, int den) {
          return den > 0 ? 100.0 * num / den : std::numeric_limits<double>::quiet_NaN();
        };
        cell.undetected_or_late_pct_vv = pct(bad_vv, n_col_vv);
        cell.undetected_or_late_pct_vp = pct(bad_vp, n_col_vp);
        cell.fp_pct_vv = pct(fp_vv, n_alerts_vv);
        cell.fp_pct_vp = pct(fp_vp, n_alerts_vp);
        return cell;
      }));
    }
  }
  for (auto & f : futures) result.cells.push_back(f.get());
  return result;
}

// ---------------------------------------------------------------------------
// Run summary (figure-equivalent aggregates).

struct OutcomeCounts
{
  int in_time = 0;
  int late = 0;
  int not_detected = 0;
  int uncoverable = 0;
  int total() const { return in_time + late + not_detected + uncoverable; }
};

struct AlertCounts
{
  int timely = 0;
  int late = 0;
  int false_positive = 0;
  int total() const { return timely + late + false_positive; }
};

struct Summary
{
  std::string latency_name;
  std::string reaction_name;
  OutcomeCounts outcomes_vv, outcomes_vp;
  AlertCounts alerts_vv, alerts_vp;
  std::vector<CdfPoint> fp_cdf_vv, fp_cdf_vp;

  const OutcomeCounts & outcomes(PairKind k) const
  {
    return k == PairKind::kVehVeh ? outcomes_vv : outcomes_vp;
  }
  const AlertCounts & alerts(PairKind k) const
  {
    return k == PairKind::kVehVeh ? alerts_vv : alerts_vp;
  }
};

/// "n/a" for 0/0 instead of a misleading number.
inline std::string pct_or_absent(int num, int den)
{
  if (den == 0) return "n/a";
  return format_double(100.0 * num / den);
}

inline Summary summarize(
  const RunLogs & logs, const DetectorParams & params, const LatencyProfile & latency,
  const ReactionProfile & reaction, double max_decel, const FootprintSpec & foot,
  const std::string & latency_name = "", const std::string & reaction_name = "")
{
  Summary s;
  s.latency_name = latency_name;
  s.reaction_name = reaction_name;

  const TrajectoryIndex traj(logs.trajectory);
  const auto classified =
    classify_collisions(logs.collisions, logs.alerts, reaction, latency, traj, max_decel);
  const auto alert_classes = classify_alerts(logs.alerts, classified, params);

  for (const CollisionOutcome & co : classified.outcomes) {
    OutcomeCounts & c = co.col.kind == PairKind::kVehVeh ? s.outcomes_vv : s.outcomes_vp;
    switch (co.outcome) {
      case OutcomeClass::kDetectedInTime:
        ++c.in_time;
        break;
      case OutcomeClass::kDetectedTooLate:
        ++c.late;
        break;
      case OutcomeClass::kNotDetected:
        ++c.not_detected;
        break;
    }
  }
  for (const CollisionRecord & col : classified.uncoverable) {
    (col.kind == PairKind::kVehVeh ? s.outcomes_vv : s.outcomes_vp).uncoverable += 1;
  }
  for (std::size_t i = 0; i < logs.alerts.size(); ++i) {
    AlertCounts & c = logs.alerts[i].kind == PairKind::kVehVeh ? s.alerts_vv : s.alerts_vp;
    switch (alert_classes[i]) {
      case AlertClass::kTrueTimely:
        ++c.timely;
        break;
      case AlertClass::kTrueLate:
        ++c.late;
        break;
      case AlertClass::kFalsePositive:
        ++c.false_positive;
        break;
    }
  }
  s.fp_cdf_vv = fp_min_distance_cdf(
    false_positive_pairs(logs.alerts, logs.collisions, PairKind::kVehVeh), traj, foot);
  s.fp_cdf_vp = fp_min_distance_cdf(
    false_positive_pairs(logs.alerts, logs.collisions, PairKind::kVehPed), traj, foot);
  return s;
}

inline void write_summary_text(std::ostream & os, const Summary & s)
{
  const auto outcome_block = [&](const char * name, const OutcomeCounts & c) {
    os << name << " collisions: " << c.total() << "\n"
       << "  detected in time:  " << c.in_time << " (" << pct_or_absent(c.in_time, c.total())
       << "%)\n"
       << "  detected too late: " << c.late << " (" << pct_or_absent(c.late, c.total()) << "%)\n"
       << "  not detected:      " << c.not_detected << " ("
       << pct_or_absent(c.not_detected, c.total()) << "%)\n"
       << "  uncoverable:       " << c.uncoverable << "\n";
  };
  const auto alert_block = [&](const char * name, const AlertCounts & c) {
    os << name << " alerts: " << c.total() << "\n"
       << "  true timely:    " << c.timely << " (" << pct_or_absent(c.timely, c.total()) << "%)\n"
       << "  true late:      " << c.late << " (" << pct_or_absent(c.late, c.total()) << "%)\n"
       << "  false positive: " << c.false_positive << " ("
       << pct_or_absent(c.false_positive, c.total()) << "%)\n";
  };
  os << "placement: " << (s.latency_name.empty() ? "custom" : s.latency_name)
     << "  reaction: " << (s.reaction_name.empty() ? "custom" : s.reaction_name) << "\n";
  outcome_block("veh_veh", s.outcomes_vv);
  outcome_block("veh_ped", s.outcomes_vp);
  alert_block("veh_veh", s.alerts_vv);
  alert_block("veh_ped", s.alerts_vp);
}

// ---------------------------------------------------------------------------
// Plot-ready comma-separated tables.

inline void write_outcomes_table(std::ostream & os, const Summary & s)
{
  os << "kind,collisions,detected_in_time,detected_too_late,not_detected,uncoverable,"
        "pct_in_time,pct_late,pct_not_detected\n";
  for (PairKind k : {PairKind::kVehVeh, PairKind::kVehPed}) {
    const OutcomeCounts & c = s.outcomes(k);
    os << to_string(k) << ',' << c.total() << ',' << c.in_time << ',' << c.late << ','
       << c.not_detected << ',' << c.uncoverable << ',' << pct_or_absent(c.in_time, c.total())
       << ',' << pct_or_absent(c.late, c.total()) << ','
       << pct_or_absent(c.not_detected, c.total()) << '\n';
  }
}

inline void write_alert_classes_table(std::ostream & os, const Summary & s)
{
  os << "kind,alerts,true_timely,true_late,false_positive,pct_false_positive\n";
  for (PairKind k : {PairKind::kVehVeh, PairKind::kVehPed}) {
    const AlertCounts & c = s.alerts(k);
    os << to_string(k) << ',' << c.total() << ',' << c.timely << ',' << c.late << ','
       << c.false_positive << ',' << pct_or_absent(c.false_positive, c.total()) << '\n';
  }
}

inline void write_fp_cdf_table(std::ostream & os, const Summary & s)
{
  os << "kind,distance,cum_fraction\n";
  for (const CdfPoint & p : s.fp_cdf_vv) {
    os << "veh_veh," << format_double(p.value) << ',' << format_double(p.cum_fraction) << '\n';
  }
  for (const CdfPoint & p : s.fp_cdf_vp) {
    os << "veh_ped," << format_double(p.value) << ',' << format_double(p.cum_fraction) << '\n';
  }
}

/// Heatmap matrix with the s2c grid as columns and the t2c grid as rows.
inline void write_matrix(
  std::ostream & os, const std::vector<double> & t2c_grid, const std::vector<double> & s2c_grid,
  const std::vector<double> & values)
{
  os << "t2c_t\\s2c_t";
  for (double s2c : s2c_grid) os << ',' << format_double(s2c);
  os << '\n';
  for (std::size_t i = 0; i < t2c_grid.size(); ++i) {
    os << format_double(t2c_grid[i]);
    for (std::size_t j = 0; j < s2c_grid.size(); ++j) {
      os << ',' << format_double(values[i * s2c_grid.size() + j]);
    }
    os << '\n';
  }
}

/// Generic comma-separated table with one header row; the round-trip reader
/// for every table this suite emits.
struct Table
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline Table read_table(std::istream & in)
{
  Table t;
  std::string line;
  if (!std::getline(in, line) || line.empty()) {
    throw LogFormatError{"table: missing header row"};
  }
  t.header = detail::split_fields(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = detail::split_fields(line);
    if (fields.size() != t.header.size()) {
      throw LogFormatError{"table: row width differs from header: " + line};
    }
    t.rows.push_back(std::move(fields));
  }
  return t;
}

}  // namespace cavsim
