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

#include "cavsim/config.hpp"
#include "cavsim/logs.hpp"
#include "cavsim/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace cavsim;

TEST(KvFile, ParsesKeysCommentsAndBlanks)
{
  KvFile kv = KvFile::parse_string(
    "# comment\n"
    "duration = 300\n"
    "\n"
    "name = hello world  # trailing comment\n");
  EXPECT_DOUBLE_EQ(kv.get_double("duration", 0.0), 300.0);
  EXPECT_EQ(kv.get_string("name", ""), "hello world");
  EXPECT_TRUE(kv.unknown_keys().empty());
}

TEST(KvFile, DuplicateKeyFails)
{
  EXPECT_THROW(KvFile::parse_string("a = 1\na = 2\n"), ConfigError);
}

TEST(KvFile, MissingEqualsFails)
{
  EXPECT_THROW(KvFile::parse_string("not a pair\n"), ConfigError);
}

TEST(KvFile, UnknownKeysAreListed)
{
  KvFile kv = KvFile::parse_string("known = 1\ntypo_key = 2\n");
  kv.get_double("known", 0.0);
  try {
    kv.reject_unknown_keys();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError & e) {
    EXPECT_NE(std::string(e.what()).find("typo_key"), std::string::npos);
  }
}

TEST(KvFile, TypedGettersValidate)
{
  KvFile kv = KvFile::parse_string("x = abc\nflag = yes\nlist = 1,2,foo\n");
  EXPECT_THROW(kv.get_double("x", 0.0), ConfigError);
  EXPECT_THROW(kv.get_bool("flag", false), ConfigError);
  EXPECT_THROW(kv.get_double_list("list", {}), ConfigError);
}

TEST(RunConfigLoad, DefaultsMatchTheReferenceSetup)
{
  KvFile kv = KvFile::parse_string("");
  const RunConfig c = run_config_from_kv(kv);
  EXPECT_DOUBLE_EQ(c.duration, 300.0);
  EXPECT_DOUBLE_EQ(c.arrivals.lambda_v, 0.7);
  EXPECT_DOUBLE_EQ(c.arrivals.lambda_p, 0.1);
  EXPECT_DOUBLE_EQ(c.detector.vehicle.t2c_t, 10.0);
  EXPECT_DOUBLE_EQ(c.detector.vehicle.s2c_t, 5.0);
  EXPECT_DOUBLE_EQ(c.detector.pedestrian.t2c_t, 5.0);
  EXPECT_DOUBLE_EQ(c.detector.pedestrian.s2c_t, 2.0);
  EXPECT_DOUBLE_EQ(c.detector.max_cam_age, 0.8);
  EXPECT_DOUBLE_EQ(c.detector.cam_frequency_hz, 10.0);
  EXPECT_DOUBLE_EQ(c.detector.alert_max_frequency_hz, 1.0);
  EXPECT_DOUBLE_EQ(c.latency.backhaul_latency, 0.005);
  EXPECT_DOUBLE_EQ(c.reaction.processing_time, 0.4);
  EXPECT_DOUBLE_EQ(c.reaction.human_reaction, 1.0);
  EXPECT_TRUE(c.alerts_enabled);
  EXPECT_FALSE(c.closed_loop);
}

TEST(RunConfigLoad, RejectsZeroDuration)
{
  KvFile kv = KvFile::parse_string("duration = 0\n");
  EXPECT_THROW(run_config_from_kv(kv), ConfigError);
}

TEST(RunConfigLoad, RejectsUnknownKey)
{
  KvFile kv = KvFile::parse_string("durations = 300\n");
  EXPECT_THROW(run_config_from_kv(kv), ConfigError);
}

TEST(RunConfigLoad, RejectsMissingScenarioFile)
{
  KvFile kv = KvFile::parse_string("scenario = /does/not/exist.cfg\n");
  EXPECT_THROW(run_config_from_kv(kv), ConfigError);
}

TEST(RunConfigLoad, ProfilesAndOverrides)
{
  KvFile kv = KvFile::parse_string(
    "latency_profile = cloud\n"
    "radio_latency = 0.02\n"
    "reaction_profile = automated\n"
    "seeds = 4,5,6\n"
    "closed_loop = true\n");
  const RunConfig c = run_config_from_kv(kv);
  EXPECT_DOUBLE_EQ(c.latency.backhaul_latency, 0.020);
  EXPECT_DOUBLE_EQ(c.latency.radio_latency, 0.020);
  EXPECT_DOUBLE_EQ(c.reaction.human_reaction, 0.0);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{4, 5, 6}));
  EXPECT_TRUE(c.closed_loop);
}

TEST(RunConfigLoad, UnknownProfileNameFails)
{
  KvFile kv = KvFile::parse_string("latency_profile = fog\n");
  EXPECT_THROW(run_config_from_kv(kv), ConfigError);
}

TEST(ScenarioLoad, ValidatesGeometry)
{
  ScenarioConfig s;
  s.intersection_x1 = 400.0;
  s.intersection_x2 = 300.0;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(DoubleFormat, ShortestFormRoundTripsExactly)
{
  SplitMix64 rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double x = (rng.next_double() - 0.5) * std::pow(10.0, static_cast<int>(rng.next_below(8)));
    const std::string s = format_double(x);
    EXPECT_EQ(parse_double_field(s), x);
  }
}

TEST(LogRoundTrip, TrajectoryIsBitExact)
{
  std::vector<TrajectorySample> rows;
  SplitMix64 rng(5);
  for (int i = 0; i < 500; ++i) {
    rows.push_back(
      {rng.next_double() * 300, rng.next_u64() % 100,
       rng.next_bernoulli(0.2) ? EntityClass::kPedestrian : EntityClass::kVehicle,
       rng.next_double() * 500, rng.next_double() * 500, rng.next_double() * 14,
       rng.next_double() * 6.28, rng.next_double() * 9 - 4.5});
  }
  std::ostringstream os;
  write_trajectory(os, rows);
  std::istringstream in(os.str());
  const auto parsed = read_trajectory(in);
  ASSERT_EQ(parsed.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(parsed[i].time, rows[i].time);
    EXPECT_EQ(parsed[i].id, rows[i].id);
    EXPECT_EQ(parsed[i].cls, rows[i].cls);
    EXPECT_EQ(parsed[i].x, rows[i].x);
    EXPECT_EQ(parsed[i].y, rows[i].y);
    EXPECT_EQ(parsed[i].speed, rows[i].speed);
    EXPECT_EQ(parsed[i].heading, rows[i].heading);
    EXPECT_EQ(parsed[i].accel, rows[i].accel);
  }
}

TEST(LogRoundTrip, AlertsAndCollisions)
{
  std::vector<AlertRow> alerts = {
    {12.015, 3, 7, PairKind::kVehVeh, 5.25, 0.125},
    {13.115, 2, 9, PairKind::kVehPed, 4.0, 1.5},
  };
  std::ostringstream aos;
  write_alerts(aos, alerts);
  std::istringstream ain(aos.str());
  const auto aparsed = read_alerts(ain);
  ASSERT_EQ(aparsed.size(), 2u);
  EXPECT_EQ(aparsed[0].issued_at, alerts[0].issued_at);
  EXPECT_EQ(aparsed[1].kind, PairKind::kVehPed);

  std::vector<CollisionRecord> cols(1);
  cols[0].time = 17.31;
  cols[0].pair = {4, 11};
  cols[0].kind = PairKind::kVehVeh;
  cols[0].position = {178.25, -3.0};
  std::ostringstream cos;
  write_collisions(cos, cols);
  std::istringstream cin(cos.str());
  const auto cparsed = read_collisions(cin);
  ASSERT_EQ(cparsed.size(), 1u);
  EXPECT_EQ(cparsed[0].time, cols[0].time);
  EXPECT_EQ(cparsed[0].pair, cols[0].pair);
  EXPECT_EQ(cparsed[0].position.x, cols[0].position.x);
}

TEST(LogRoundTrip, BadHeaderFails)
{
  std::istringstream in("wrong,header\n1,2\n");
  EXPECT_THROW(read_trajectory(in), LogFormatError);
}

TEST(CamFromSample, ReconstructsTheVelocityVector)
{
  const TrajectorySample s{1.5, 42, EntityClass::kVehicle, 10, -3, 13.89, 0.0, -2.0};
  const Cam cam = cam_from_sample(s);
  EXPECT_EQ(cam.sender_id, 42u);
  EXPECT_DOUBLE_EQ(cam.state.velocity.x, 13.89);
  EXPECT_DOUBLE_EQ(cam.state.velocity.y, 0.0);
  EXPECT_DOUBLE_EQ(cam.state.acceleration.x, -2.0);
}
