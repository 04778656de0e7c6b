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
#include "cavsim/mobility.hpp"
#include "cavsim/netmodel.hpp"
#include "cavsim/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cavsim
{

/// Everything one simulation batch needs. Loaded from a single key-value
/// file; unknown or ill-typed keys abort before any simulation starts.
struct RunConfig
{
  std::string scenario_path;  // empty: built-in defaults
  ScenarioConfig scenario;
  double duration = 300.0;
  std::vector<std::uint64_t> seeds = {1};
  ArrivalConfig arrivals;  // seed field is overridden per run
  DetectorParams detector;
  std::string latency_profile = "metro";
  LatencyProfile latency = LatencyProfile::metro();
  std::string reaction_profile = "human";
  ReactionProfile reaction = ReactionProfile::human_driver();
  std::string out_dir = "out";
  bool alerts_enabled = true;
  bool closed_loop = false;
  ViolationConfig violation;
  int trajectory_decimation = 10;

  // Sweep grids (threshold and arrival-rate studies).
  std::vector<double> sweep_t2c = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> sweep_s2c = {1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> sweep_lambda_v = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7,
                                        0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5};
  std::vector<double> sweep_lambda_p = {0.0, 0.05, 0.10, 0.15, 0.20};
  std::vector<std::uint64_t> sweep_seeds = {1, 2, 3};

  WorldConfig world_config(std::uint64_t seed) const
  {
    WorldConfig wc;
    wc.scenario = scenario;
    wc.arrivals = arrivals;
    wc.arrivals.seed = seed;
    wc.violation = violation;
    return wc;
  }

  CoupledRunOptions run_options() const
  {
    CoupledRunOptions opt;
    opt.alerts_enabled = alerts_enabled;
    opt.closed_loop = closed_loop;
    opt.trajectory_decimation = trajectory_decimation;
    return opt;
  }

  void validate() const
  {
    if (!(duration > 0.0)) throw ConfigError{"duration must be positive"};
    if (seeds.empty()) throw ConfigError{"at least one seed is required"};
    if (arrivals.lambda_v < 0.0 || arrivals.lambda_p < 0.0) {
      throw ConfigError{"arrival rates must be non-negative"};
    }
    for (double p : {violation.vehicle, violation.pedestrian}) {
      if (p < 0.0 || p > 1.0) throw ConfigError{"violation probabilities must be in [0, 1]"};
    }
    if (trajectory_decimation <= 0) throw ConfigError{"trajectory_decimation must be positive"};
    detector.validate();
    scenario.validate();
    if (!scenario_path.empty() && !std::filesystem::exists(scenario_path)) {
      throw ConfigError{"scenario file does not exist: " + scenario_path};
    }
  }
};

inline RunConfig run_config_from_kv(KvFile & kv)
{
  RunConfig c;
  c.scenario_path = kv.get_string("scenario", "");
  if (!c.scenario_path.empty()) {
    if (!std::filesystem::exists(c.scenario_path)) {
      throw ConfigError{"scenario file does not exist: " + c.scenario_path};
    }
    c.scenario = load_scenario(c.scenario_path);
  }
  c.duration = kv.get_double("duration", c.duration);
  c.seeds = kv.get_uint_list("seeds", c.seeds);
  c.arrivals.lambda_v = kv.get_double("lambda_v", c.arrivals.lambda_v);
  c.arrivals.lambda_p = kv.get_double("lambda_p", c.arrivals.lambda_p);

  c.detector.vehicle.t2c_t = kv.get_double("t2c_vehicle", c.detector.vehicle.t2c_t);
  c.detector.vehicle.s2c_t = kv.get_double("s2c_vehicle", c.detector.vehicle.s2c_t);
  c.detector.pedestrian.t2c_t = kv.get_double("t2c_pedestrian", c.detector.pedestrian.t2c_t);
  c.detector.pedestrian.s2c_t = kv.get_double("s2c_pedestrian", c.detector.pedestrian.s2c_t);
  c.detector.max_cam_age = kv.get_double("max_cam_age", c.detector.max_cam_age);
  c.detector.cam_frequency_hz = kv.get_double("cam_frequency", c.detector.cam_frequency_hz);
  c.detector.alert_max_frequency_hz =
    kv.get_double("alert_max_frequency", c.detector.alert_max_frequency_hz);

  c.latency_profile = kv.get_string("latency_profile", c.latency_profile);
  c.latency = LatencyProfile::by_name(c.latency_profile);
  c.latency.backhaul_latency = kv.get_double("backhaul_latency", c.latency.backhaul_latency);
  c.latency.radio_latency = kv.get_double("radio_latency", c.latency.radio_latency);

  c.reaction_profile = kv.get_string("reaction_profile", c.reaction_profile);
  c.reaction = ReactionProfile::by_name(c.reaction_profile);
  c.reaction.processing_time = kv.get_double("processing_time", c.reaction.processing_time);
  c.reaction.human_reaction = kv.get_double("human_reaction", c.reaction.human_reaction);

  c.out_dir = kv.get_string("out_dir", c.out_dir);
  c.alerts_enabled = kv.get_bool("alerts_enabled", c.alerts_enabled);
  c.closed_loop = kv.get_bool("closed_loop", c.closed_loop);
  c.violation.vehicle = kv.get_double("p_violate_vehicle", c.violation.vehicle);
  c.violation.pedestrian = kv.get_double("p_violate_pedestrian", c.violation.pedestrian);
  c.trajectory_decimation =
    static_cast<int>(kv.get_int("trajectory_decimation", c.trajectory_decimation));

  c.sweep_t2c = kv.get_double_list("sweep_t2c", c.sweep_t2c);
  c.sweep_s2c = kv.get_double_list("sweep_s2c", c.sweep_s2c);
  c.sweep_lambda_v = kv.get_double_list("sweep_lambda_v", c.sweep_lambda_v);
  c.sweep_lambda_p = kv.get_double_list("sweep_lambda_p", c.sweep_lambda_p);
  c.sweep_seeds = kv.get_uint_list("sweep_seeds", c.sweep_seeds);

  kv.reject_unknown_keys();
  c.validate();
  return c;
}

inline RunConfig load_run_config(const std::string & path)
{
  KvFile kv = KvFile::parse_file(path);
  return run_config_from_kv(kv);
}

}  // namespace cavsim
