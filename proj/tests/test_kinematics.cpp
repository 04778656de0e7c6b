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

#include "cavsim/kinematics.hpp"
#include "cavsim/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace cavsim;

namespace
{

KinematicState state(double px, double py, double vx, double vy, double ax = 0, double ay = 0)
{
  return {{px, py}, {vx, vy}, {ax, ay}};
}

// Brute-force oracle, independent of the library path: samples the distance
// on a fixed time grid using plain component arithmetic.
struct BruteMin
{
  double t = 0.0;
  double d = 0.0;
};

BruteMin brute_force_min(const KinematicState & a, const KinematicState & b, double horizon,
                         double step)
{
  BruteMin best{0.0, std::numeric_limits<double>::infinity()};
  const long n = static_cast<long>(horizon / step);
  for (long i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * step;
    const double dx = (a.position.x + a.velocity.x * t) - (b.position.x + b.velocity.x * t);
    const double dy = (a.position.y + a.velocity.y * t) - (b.position.y + b.velocity.y * t);
    const double d = std::sqrt(dx * dx + dy * dy);
    if (d < best.d) {
      best = {t, d};
    }
  }
  return best;
}

KinematicState random_state(SplitMix64 & rng)
{
  const double px = rng.next_double() * 400.0 - 200.0;
  const double py = rng.next_double() * 400.0 - 200.0;
  const double speed = rng.next_double() * 20.0;
  const double angle = rng.next_double() * 2.0 * M_PI;
  return state(px, py, speed * std::cos(angle), speed * std::sin(angle));
}

}  // namespace

TEST(SquaredDistanceAt, StaticPointsArePythagorean)
{
  EXPECT_DOUBLE_EQ(squared_distance_at(state(0, 0, 0, 0), state(3, 4, 0, 0), 7.0), 25.0);
}

TEST(SquaredDistanceAt, SymmetricHeadOnMeetsAtMidpoint)
{
  EXPECT_DOUBLE_EQ(squared_distance_at(state(0, 0, 10, 0), state(100, 0, -10, 0), 5.0), 0.0);
}

TEST(SquaredDistanceAt, CrossingPairAtGivenTime)
{
  // a reaches (55, 0), b reaches (60, 5): dx = -5, dy = -5.
  const double d2 = squared_distance_at(state(0, 0, 10, 0), state(60, -50, 0, 10), 5.5);
  EXPECT_NEAR(d2, 50.0, 1e-12);
}

TEST(ClosestApproach, HeadOnPair)
{
  const CpaResult r = closest_approach(state(0, 0, 10, 0), state(100, 0, -10, 0));
  ASSERT_TRUE(r.is_approaching());
  EXPECT_DOUBLE_EQ(r.t_star, 5.0);
  EXPECT_DOUBLE_EQ(r.d_star, 0.0);
}

TEST(ClosestApproach, MovingApartIsReceding)
{
  const CpaResult r = closest_approach(state(0, 0, 10, 0), state(-100, 0, -10, 0));
  EXPECT_EQ(r.kind, CpaResult::Kind::kReceding);
}

TEST(ClosestApproach, CrossingPairMatchesBruteForce)
{
  const KinematicState a = state(0, 0, 10, 0);
  const KinematicState b = state(60, -50, 0, 10);
  const CpaResult r = closest_approach(a, b);
  ASSERT_TRUE(r.is_approaching());
  EXPECT_NEAR(r.t_star, 5.5, 1e-12);
  EXPECT_NEAR(r.d_star, std::sqrt(50.0), 1e-12);

  const BruteMin brute = brute_force_min(a, b, 20.0, 1e-3);
  EXPECT_NEAR(r.d_star, brute.d, 1e-3);
  EXPECT_NEAR(r.t_star, brute.t, 1e-3);
}

TEST(ClosestApproach, IdenticalVelocitiesAreParallel)
{
  const CpaResult r = closest_approach(state(0, 0, 3, 4), state(10, 0, 3, 4));
  ASSERT_TRUE(r.is_parallel());
  EXPECT_DOUBLE_EQ(r.d_star, 10.0);
}

TEST(ClosestApproach, CurrentMinimumCountsAsApproaching)
{
  // Perpendicular offset only: derivative of D at 0 is zero -> t* = 0.
  const CpaResult r = closest_approach(state(0, 0, 10, 0), state(0, 5, -10, 0));
  ASSERT_TRUE(r.is_approaching());
  EXPECT_DOUBLE_EQ(r.t_star, 0.0);
  EXPECT_DOUBLE_EQ(r.d_star, 5.0);
}

TEST(ClosestApproach, OracleEquivalenceOnSeededPairs)
{
  SplitMix64 rng(2026);
  int compared = 0;
  for (int i = 0; i < 2000; ++i) {
    const KinematicState a = random_state(rng);
    const KinematicState b = random_state(rng);
    const CpaResult r = closest_approach(a, b);
    if (!r.is_approaching() || r.t_star > 60.0) continue;
    const BruteMin brute = brute_force_min(a, b, 60.0, 1e-3);
    ASSERT_NEAR(r.d_star, brute.d, 1e-3);
    ASSERT_NEAR(r.t_star, brute.t, 1e-3);
    ++compared;
  }
  EXPECT_GT(compared, 100);
}

TEST(ClosestApproach, MinimalityOverSampledTimes)
{
  SplitMix64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const KinematicState a = random_state(rng);
    const KinematicState b = random_state(rng);
    const CpaResult r = closest_approach(a, b);
    if (!r.is_approaching()) continue;
    for (int k = 0; k <= 100; ++k) {
      const double t = 0.6 * static_cast<double>(k);
      ASSERT_GE(squared_distance_at(a, b, t), r.d_star * r.d_star - 1e-9);
    }
  }
}

TEST(ClosestApproach, SymmetryIsExact)
{
  SplitMix64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const KinematicState a = random_state(rng);
    const KinematicState b = random_state(rng);
    const CpaResult ab = closest_approach(a, b);
    const CpaResult ba = closest_approach(b, a);
    ASSERT_EQ(ab.kind, ba.kind);
    ASSERT_EQ(ab.t_star, ba.t_star);
    ASSERT_EQ(ab.d_star, ba.d_star);
  }
}

TEST(ClosestApproach, RigidTransformInvariance)
{
  SplitMix64 rng(13);
  for (int i = 0; i < 500; ++i) {
    const KinematicState a = random_state(rng);
    const KinematicState b = random_state(rng);
    const CpaResult base = closest_approach(a, b);
    const double angle = rng.next_double() * 2.0 * M_PI;
    const Vec2 shift{rng.next_double() * 100 - 50, rng.next_double() * 100 - 50};
    const auto transform = [&](const KinematicState & s) {
      return KinematicState{s.position.rotated(angle) + shift, s.velocity.rotated(angle), {}};
    };
    const CpaResult moved = closest_approach(transform(a), transform(b));
    ASSERT_EQ(base.kind, moved.kind);
    if (base.is_approaching()) {
      ASSERT_NEAR(moved.t_star, base.t_star, 1e-9 * std::max(1.0, std::abs(base.t_star)));
      ASSERT_NEAR(moved.d_star, base.d_star, 1e-9 * std::max(1.0, base.d_star));
    }
  }
}

TEST(ClosestApproachAccel, RejectsBadArguments)
{
  const KinematicState a = state(0, 0, 1, 0);
  EXPECT_THROW(closest_approach_accel(a, a, 0.0, 0.01), std::invalid_argument);
  EXPECT_THROW(closest_approach_accel(a, a, 10.0, 0.0), std::invalid_argument);
  EXPECT_THROW(closest_approach_accel(a, a, -1.0, -1.0), std::invalid_argument);
}

TEST(ClosestApproachAccel, ReducesToConstantVelocity)
{
  const CpaResult r =
    closest_approach_accel(state(0, 0, 10, 0), state(100, 0, -10, 0), 20.0, 0.01);
  ASSERT_TRUE(r.is_approaching());
  EXPECT_NEAR(r.t_star, 5.0, 1e-3);
  EXPECT_NEAR(r.d_star, 0.0, 1e-6);
}

TEST(ClosestApproachAccel, BrakingVehicleStopsAndNeverReverses)
{
  // Stops after v/|a| = 5 s having travelled v^2/(2a) = 25 m; the gap to the
  // parked vehicle stays 75 m from then on.
  const CpaResult r =
    closest_approach_accel(state(0, 0, 10, 0, -2, 0), state(100, 0, 0, 0), 20.0, 0.01);
  ASSERT_TRUE(r.is_approaching());
  EXPECT_NEAR(r.d_star, 75.0, 1e-6);
  EXPECT_GE(r.t_star, 5.0 - 0.02);
}

TEST(ClosestApproachAccel, MatchesOracleOnCrossingPair)
{
  const CpaResult r =
    closest_approach_accel(state(0, 0, 10, 0), state(60, -50, 0, 10), 20.0, 0.01);
  ASSERT_TRUE(r.is_approaching());
  EXPECT_NEAR(r.t_star, 5.5, 1e-3);
  EXPECT_NEAR(r.d_star, std::sqrt(50.0), 1e-3);
}

TEST(ClosestApproachAccel, AgreesWithClosedFormWhenAccelerationsAreZero)
{
  SplitMix64 rng(17);
  for (int i = 0; i < 300; ++i) {
    const KinematicState a = random_state(rng);
    const KinematicState b = random_state(rng);
    const CpaResult closed = closest_approach(a, b);
    const CpaResult numeric = closest_approach_accel(a, b, 60.0, 0.01);
    if (closed.is_approaching() && closed.t_star < 59.0) {
      ASSERT_TRUE(numeric.is_approaching());
      ASSERT_NEAR(numeric.t_star, closed.t_star, 1e-3);
      ASSERT_NEAR(numeric.d_star, closed.d_star, 1e-6);
    } else if (closed.kind == CpaResult::Kind::kReceding) {
      ASSERT_EQ(numeric.kind, CpaResult::Kind::kReceding);
    }
  }
}

TEST(ClosestApproachAccel, ParallelWhenRelativeMotionIsZero)
{
  const CpaResult r =
    closest_approach_accel(state(0, 0, 3, 4, 1, 0), state(7, 0, 3, 4, 1, 0), 10.0, 0.01);
  ASSERT_TRUE(r.is_parallel());
  EXPECT_DOUBLE_EQ(r.d_star, 7.0);
}
