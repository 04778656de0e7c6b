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

#include "cavsim/detector.hpp"
#include "cavsim/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

using namespace cavsim;

namespace
{

Cam make_cam(EntityId id, EntityClass cls, double t, Vec2 pos, Vec2 vel)
{
  return {id, cls, t, {pos, vel, {0, 0}}};
}

std::set<EntityId> detected_ids(const std::vector<CollisionCourse> & courses)
{
  std::set<EntityId> out;
  for (const auto & c : courses) out.insert(c.other);
  return out;
}

}  // namespace

TEST(Ingest, FreshCamIsStored)
{
  DetectorParams params;
  CamStore store;
  EXPECT_EQ(
    store.ingest(make_cam(1, EntityClass::kVehicle, 10.0, {0, 0}, {1, 0}), 10.5, params),
    IngestResult::kStored);
  EXPECT_EQ(store.size(), 1u);
}

TEST(Ingest, OldCamIsStale)
{
  DetectorParams params;
  CamStore store;
  EXPECT_EQ(
    store.ingest(make_cam(1, EntityClass::kVehicle, 10.0, {0, 0}, {1, 0}), 10.81, params),
    IngestResult::kStale);
  EXPECT_EQ(store.size(), 0u);
}

TEST(Ingest, AgeJustInsideTheLimitIsFresh)
{
  DetectorParams params;
  CamStore store;
  EXPECT_EQ(
    store.ingest(make_cam(1, EntityClass::kVehicle, 10.0, {0, 0}, {1, 0}), 10.79, params),
    IngestResult::kStored);
  // Exact boundary with binary-exact times: age 0.75 s vs limit 0.8 s.
  EXPECT_EQ(
    store.ingest(make_cam(2, EntityClass::kVehicle, 10.0, {1, 0}, {1, 0}), 10.75, params),
    IngestResult::kStored);
}

TEST(Ingest, LateArrivingOlderCamNeverOverwrites)
{
  DetectorParams params;
  CamStore store;
  ASSERT_EQ(
    store.ingest(make_cam(1, EntityClass::kVehicle, 10.0, {5, 5}, {1, 0}), 10.05, params),
    IngestResult::kStored);
  EXPECT_EQ(
    store.ingest(make_cam(1, EntityClass::kVehicle, 9.9, {4, 4}, {1, 0}), 10.05, params),
    IngestResult::kStale);
  ASSERT_NE(store.find(1), nullptr);
  EXPECT_DOUBLE_EQ(store.find(1)->generated_at, 10.0);
  EXPECT_DOUBLE_EQ(store.find(1)->state.position.x, 5.0);
}

TEST(Ingest, NonFiniteCamIsRejected)
{
  DetectorParams params;
  CamStore store;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(
    store.ingest(make_cam(1, EntityClass::kVehicle, 10.0, {nan, 0}, {1, 0}), 10.0, params),
    std::invalid_argument);
  EXPECT_THROW(
    store.ingest(
      make_cam(1, EntityClass::kVehicle, std::numeric_limits<double>::infinity(), {0, 0}, {1, 0}),
      10.0, params),
    std::invalid_argument);
}

TEST(ActionRadius, FollowsTableValues)
{
  DetectorParams params;
  EXPECT_NEAR(action_radius(13.89, params.vehicle), 138.9, 1e-9);
  EXPECT_DOUBLE_EQ(action_radius(0.0, params.vehicle), 5.0);
  EXPECT_DOUBLE_EQ(action_radius(2.0, params.pedestrian), 10.0);
}

TEST(CandidateSet, PedestrianPairsAreSkipped)
{
  DetectorParams params;
  CamStore store;
  const double now = 1.0;
  store.ingest(make_cam(1, EntityClass::kPedestrian, now, {0, 0}, {1, 0}), now, params);
  store.ingest(make_cam(2, EntityClass::kPedestrian, now, {1, 0}, {1, 0}), now, params);
  store.ingest(make_cam(3, EntityClass::kPedestrian, now, {2, 0}, {1, 0}), now, params);
  const auto cands = candidate_set(*store.find(1), store, now, params);
  EXPECT_TRUE(cands.empty());
}

TEST(CandidateSet, RangeOfActionPrunes)
{
  DetectorParams params;
  CamStore store(200.0);
  const double now = 1.0;
  store.ingest(make_cam(1, EntityClass::kVehicle, now, {0, 0}, {13.89, 0}), now, params);
  store.ingest(make_cam(2, EntityClass::kVehicle, now, {140, 0}, {0, 0}), now, params);  // beyond 138.9
  store.ingest(make_cam(3, EntityClass::kVehicle, now, {130, 0}, {0, 0}), now, params);
  const auto cands = candidate_set(*store.find(1), store, now, params);
  EXPECT_EQ(detected_ids({}), (std::set<EntityId>{}));
  std::set<EntityId> ids;
  for (const Cam & c : cands) ids.insert(c.sender_id);
  EXPECT_EQ(ids, (std::set<EntityId>{3}));
}

TEST(CandidateSet, StationarySenderKeepsFloorRadius)
{
  DetectorParams params;
  CamStore store;
  const double now = 1.0;
  store.ingest(make_cam(1, EntityClass::kVehicle, now, {0, 0}, {0, 0}), now, params);
  store.ingest(make_cam(2, EntityClass::kVehicle, now, {4, 0}, {0, 0}), now, params);
  const auto cands = candidate_set(*store.find(1), store, now, params);
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_EQ(cands[0].sender_id, 2u);
}

TEST(DetectCollisions, HeadOnPairWithinThresholds)
{
  DetectorParams params;
  CamStore store;
  const double now = 1.0;
  const Cam self = make_cam(1, EntityClass::kVehicle, now, {0, 0}, {10, 0});
  store.ingest(self, now, params);
  store.ingest(make_cam(2, EntityClass::kVehicle, now, {100, 0}, {-10, 0}), now, params);
  const auto courses = detect_collisions(self, store, now, params);
  ASSERT_EQ(courses.size(), 1u);
  EXPECT_EQ(courses[0].other, 2u);
  EXPECT_NEAR(courses[0].t_star, 5.0, 1e-12);
  EXPECT_NEAR(courses[0].d_star, 0.0, 1e-12);
}

TEST(DetectCollisions, RecedingPairExcluded)
{
  DetectorParams params;
  CamStore store;
  const double now = 1.0;
  const Cam self = make_cam(1, EntityClass::kVehicle, now, {0, 0}, {10, 0});
  store.ingest(self, now, params);
  store.ingest(make_cam(2, EntityClass::kVehicle, now, {-30, 0}, {-10, 0}), now, params);
  EXPECT_TRUE(detect_collisions(self, store, now, params).empty());
}

TEST(DetectCollisions, MissDistanceAboveThresholdExcluded)
{
  DetectorParams params;
  CamStore store;
  const double now = 1.0;
  // Crossing pair with d* = sqrt(50) ~ 7.07 m > 5 m.
  const Cam self = make_cam(1, EntityClass::kVehicle, now, {0, 0}, {10, 0});
  store.ingest(self, now, params);
  store.ingest(make_cam(2, EntityClass::kVehicle, now, {60, -50}, {0, 10}), now, params);
  EXPECT_TRUE(detect_collisions(self, store, now, params).empty());
}

TEST(DetectCollisions, MixedPairGovernedByPedestrianThresholds)
{
  DetectorParams params;
  CamStore store;
  const double now = 1.0;
  // Head-on at t* = 6 s: inside the vehicle window (10 s) but outside the
  // pedestrian window (5 s); the stricter class governs.
  const Cam veh = make_cam(1, EntityClass::kVehicle, now, {0, 0}, {10, 0});
  store.ingest(veh, now, params);
  store.ingest(make_cam(2, EntityClass::kPedestrian, now, {72, 0}, {-2, 0}), now, params);
  EXPECT_TRUE(detect_collisions(veh, store, now, params).empty());

  // Same geometry against a vehicle is reported.
  store.ingest(make_cam(3, EntityClass::kVehicle, now, {72, 0}, {-2, 0}), now, params);
  EXPECT_EQ(detected_ids(detect_collisions(veh, store, now, params)), (std::set<EntityId>{3}));
}

TEST(DetectCollisions, ParallelPairWithinDistanceIsOnCourse)
{
  DetectorParams params;
  CamStore store;
  const double now = 1.0;
  const Cam self = make_cam(1, EntityClass::kVehicle, now, {0, 0}, {10, 0});
  store.ingest(self, now, params);
  store.ingest(make_cam(2, EntityClass::kVehicle, now, {4, 0}, {10, 0}), now, params);
  store.ingest(make_cam(3, EntityClass::kVehicle, now, {0, 6}, {10, 0}), now, params);
  EXPECT_EQ(detected_ids(detect_collisions(self, store, now, params)), (std::set<EntityId>{2}));
}

TEST(DetectCollisions, StatesAreExtrapolatedToNow)
{
  DetectorParams params;
  CamStore store;
  // CAM generated 0.5 s ago; by `now` the entities have closed 10 m.
  const Cam self = make_cam(1, EntityClass::kVehicle, 1.0, {0, 0}, {10, 0});
  store.ingest(self, 1.0, params);
  store.ingest(make_cam(2, EntityClass::kVehicle, 1.0, {100, 0}, {-10, 0}), 1.0, params);
  const auto courses = detect_collisions(self, store, 1.5, params);
  ASSERT_EQ(courses.size(), 1u);
  EXPECT_NEAR(courses[0].t_star, 4.5, 1e-12);
}

TEST(DetectCollisions, StaleEntriesNeverInfluenceResults)
{
  DetectorParams params;
  SplitMix64 rng(5);
  for (int round = 0; round < 50; ++round) {
    CamStore with_stale;
    CamStore without_stale;
    const double now = 100.0;
    const Cam self =
      make_cam(1, EntityClass::kVehicle, now, {0, 0}, {rng.next_double() * 10, 0});
    with_stale.ingest(self, now, params);
    without_stale.ingest(self, now, params);
    for (EntityId id = 2; id < 12; ++id) {
      const double age = rng.next_double() * 2.0;  // some beyond 0.8
      const Cam cam = make_cam(
        id, EntityClass::kVehicle, now - age,
        {rng.next_double() * 200 - 100, rng.next_double() * 200 - 100},
        {rng.next_double() * 20 - 10, rng.next_double() * 20 - 10});
      with_stale.ingest(cam, cam.generated_at, params);  // ingest at generation time
      if (age <= params.max_cam_age) {
        without_stale.ingest(cam, cam.generated_at, params);
      }
    }
    EXPECT_EQ(
      detected_ids(detect_collisions(self, with_stale, now, params)),
      detected_ids(detect_collisions(self, without_stale, now, params)));
  }
}

TEST(DetectCollisions, RangeFilterIsPureOptimization)
{
  // Differential check: every reported pair must also be reported by a
  // filter-free reimplementation of the acceptance region.
  DetectorParams params;
  SplitMix64 rng(9);
  for (int round = 0; round < 50; ++round) {
    CamStore store(50.0);
    const double now = 10.0;
    std::vector<Cam> cams;
    for (EntityId id = 1; id <= 20; ++id) {
      const Cam cam = make_cam(
        id, id % 4 == 0 ? EntityClass::kPedestrian : EntityClass::kVehicle, now,
        {rng.next_double() * 400 - 200, rng.next_double() * 400 - 200},
        {rng.next_double() * 28 - 14, rng.next_double() * 28 - 14});
      cams.push_back(cam);
      store.ingest(cam, now, params);
    }
    for (const Cam & self : cams) {
      const auto reported = detected_ids(detect_collisions(self, store, now, params));
      std::set<EntityId> unfiltered;
      for (const Cam & other : cams) {
        if (other.sender_id == self.sender_id) continue;
        if (self.cls == EntityClass::kPedestrian && other.cls == EntityClass::kPedestrian) continue;
        const ClassThresholds & th = params.governing(self.cls, other.cls);
        const CpaResult cpa = closest_approach(self.state, other.state);
        const bool on_course =
          (cpa.is_approaching() && cpa.t_star <= th.t2c_t && cpa.d_star <= th.s2c_t) ||
          (cpa.is_parallel() && cpa.d_star <= th.s2c_t);
        if (on_course) unfiltered.insert(other.sender_id);
      }
      for (EntityId id : reported) {
        ASSERT_TRUE(unfiltered.count(id)) << "pair reported only with the range filter";
      }
    }
  }
}

TEST(DetectCollisions, ClassSymmetryOnSharedSnapshot)
{
  DetectorParams params;
  SplitMix64 rng(21);
  for (int round = 0; round < 100; ++round) {
    CamStore store;
    const double now = 5.0;
    const Cam a = make_cam(
      1, EntityClass::kVehicle, now, {rng.next_double() * 100 - 50, rng.next_double() * 100 - 50},
      {rng.next_double() * 20 - 10, rng.next_double() * 20 - 10});
    const Cam b = make_cam(
      2, EntityClass::kVehicle, now, {rng.next_double() * 100 - 50, rng.next_double() * 100 - 50},
      {rng.next_double() * 20 - 10, rng.next_double() * 20 - 10});
    store.ingest(a, now, params);
    store.ingest(b, now, params);
    const bool from_a = detected_ids(detect_collisions(a, store, now, params)).count(2) > 0;
    const bool from_b = detected_ids(detect_collisions(b, store, now, params)).count(1) > 0;
    ASSERT_EQ(from_a, from_b);
  }
}

TEST(EmitAlerts, FirstDetectionAddressesBothEntities)
{
  DetectorParams params;
  AlertLimiter limiter;
  const std::vector<CollisionCourse> courses = {{7, EntityClass::kVehicle, 5.0, 0.5}};
  const auto alerts =
    emit_alerts(3, EntityClass::kVehicle, courses, 12.0, limiter, params);
  ASSERT_EQ(alerts.size(), 1u);
  EXPECT_TRUE(alerts[0].pair.contains(3));
  EXPECT_TRUE(alerts[0].pair.contains(7));
  EXPECT_EQ(alerts[0].kind, PairKind::kVehVeh);
  EXPECT_DOUBLE_EQ(alerts[0].issued_at, 12.0);
}

TEST(EmitAlerts, RateLimiterSuppressesWithinOneSecond)
{
  DetectorParams params;
  AlertLimiter limiter;
  const std::vector<CollisionCourse> courses = {{7, EntityClass::kVehicle, 5.0, 0.5}};
  EXPECT_EQ(emit_alerts(3, EntityClass::kVehicle, courses, 12.0, limiter, params).size(), 1u);
  EXPECT_EQ(emit_alerts(3, EntityClass::kVehicle, courses, 12.5, limiter, params).size(), 0u);
  EXPECT_EQ(emit_alerts(3, EntityClass::kVehicle, courses, 13.05, limiter, params).size(), 1u);
}

TEST(EmitAlerts, PairBudgetIsUnordered)
{
  DetectorParams params;
  AlertLimiter limiter;
  const std::vector<CollisionCourse> from_a = {{7, EntityClass::kVehicle, 5.0, 0.5}};
  const std::vector<CollisionCourse> from_b = {{3, EntityClass::kVehicle, 5.0, 0.5}};
  EXPECT_EQ(emit_alerts(3, EntityClass::kVehicle, from_a, 12.0, limiter, params).size(), 1u);
  // The mirrored detection shares the same budget.
  EXPECT_EQ(emit_alerts(7, EntityClass::kVehicle, from_b, 12.4, limiter, params).size(), 0u);
}

TEST(Detector, StaleCamProducesNoAlerts)
{
  Detector detector{DetectorParams{}};
  const Cam old_cam = make_cam(1, EntityClass::kVehicle, 0.0, {0, 0}, {1, 0});
  EXPECT_TRUE(detector.on_cam(old_cam, 2.0).empty());
  EXPECT_EQ(detector.store().size(), 0u);
}
