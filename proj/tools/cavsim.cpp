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

// Operator entry point: scenario runs, parameter sweeps, replay analysis and
// report emission for the collision-avoidance simulation suite.

#include "cavsim/analysis.hpp"
#include "cavsim/config.hpp"
#include "cavsim/logs.hpp"
#include "cavsim/mobility.hpp"
#include "cavsim/netmodel.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cavsim;

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;

struct CliOverrides
{
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::optional<double> duration;
  std::string latency_profile;
  std::string reaction_profile;
  std::string out_dir;
  bool no_alerts = false;
};

RunConfig load_with_overrides(const CliOverrides & o)
{
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
  if (!o.seeds.empty()) cfg.seeds = o.seeds;
  if (o.duration) cfg.duration = *o.duration;
  if (!o.latency_profile.empty()) {
    cfg.latency_profile = o.latency_profile;
    cfg.latency = LatencyProfile::by_name(o.latency_profile);
  }
  if (!o.reaction_profile.empty()) {
    cfg.reaction_profile = o.reaction_profile;
    cfg.reaction = ReactionProfile::by_name(o.reaction_profile);
  }
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.no_alerts) cfg.alerts_enabled = false;
  cfg.validate();
  return cfg;
}

void write_file(const fs::path & path, const std::function<void(std::ostream &)> & body)
{
  std::ofstream os(path);
  if (!os) throw std::runtime_error{"cannot write " + path.string()};
  body(os);
}

fs::path run_dir(const RunConfig & cfg, std::uint64_t seed)
{
  return fs::path(cfg.out_dir) / ("run_seed" + std::to_string(seed) + "_" + cfg.latency_profile);
}

RunLogs read_logs_dir(const fs::path & dir)
{
  const auto read = [&](const char * name, auto reader) {
    std::ifstream in(dir / name);
    if (!in) throw std::runtime_error{"missing log file: " + (dir / name).string()};
    return reader(in);
  };
  RunLogs logs;
  logs.trajectory = read("trajectory.csv", [](std::istream & in) { return read_trajectory(in); });
  logs.collisions = read("collisions.csv", [](std::istream & in) { return read_collisions(in); });
  logs.alerts = read("alerts.csv", [](std::istream & in) { return read_alerts(in); });
  return logs;
}

void write_logs_dir(const fs::path & dir, const RunLogs & logs)
{
  fs::create_directories(dir);
  write_file(dir / "trajectory.csv", [&](std::ostream & os) { write_trajectory(os, logs.trajectory); });
  write_file(dir / "collisions.csv", [&](std::ostream & os) { write_collisions(os, logs.collisions); });
  write_file(dir / "alerts.csv", [&](std::ostream & os) { write_alerts(os, logs.alerts); });
}

void write_summary_files(const fs::path & dir, const Summary & summary)
{
  write_file(dir / "summary.txt", [&](std::ostream & os) { write_summary_text(os, summary); });
  write_file(dir / "outcomes.csv", [&](std::ostream & os) { write_outcomes_table(os, summary); });
  write_file(
    dir / "alert_classes.csv", [&](std::ostream & os) { write_alert_classes_table(os, summary); });
  write_file(dir / "fp_cdf.csv", [&](std::ostream & os) { write_fp_cdf_table(os, summary); });
}

Summary merge_summaries(const std::vector<Summary> & parts)
{
  Summary total;
  if (!parts.empty()) {
    total.latency_name = parts.front().latency_name;
    total.reaction_name = parts.front().reaction_name;
  }
  std::vector<double> vv, vp;
  for (const Summary & s : parts) {
    const auto add_outcomes = [](OutcomeCounts & a, const OutcomeCounts & b) {
      a.in_time += b.in_time;
      a.late += b.late;
      a.not_detected += b.not_detected;
      a.uncoverable += b.uncoverable;
    };
    const auto add_alerts = [](AlertCounts & a, const AlertCounts & b) {
      a.timely += b.timely;
      a.late += b.late;
      a.false_positive += b.false_positive;
    };
    add_outcomes(total.outcomes_vv, s.outcomes_vv);
    add_outcomes(total.outcomes_vp, s.outcomes_vp);
    add_alerts(total.alerts_vv, s.alerts_vv);
    add_alerts(total.alerts_vp, s.alerts_vp);
    for (const CdfPoint & p : s.fp_cdf_vv) vv.push_back(p.value);
    for (const CdfPoint & p : s.fp_cdf_vp) vp.push_back(p.value);
  }
  const auto to_cdf = [](std::vector<double> & v) {
    std::sort(v.begin(), v.end());
    std::vector<CdfPoint> cdf;
    for (std::size_t i = 0; i < v.size(); ++i) {
      cdf.push_back({v[i], static_cast<double>(i + 1) / static_cast<double>(v.size())});
    }
    return cdf;
  };
  total.fp_cdf_vv = to_cdf(vv);
  total.fp_cdf_vp = to_cdf(vp);
  return total;
}

int cmd_run(const CliOverrides & o)
{
  const RunConfig cfg = load_with_overrides(o);
  fs::create_directories(cfg.out_dir);
  std::vector<Summary> per_seed;
  for (std::uint64_t seed : cfg.seeds) {
    const fs::path dir = run_dir(cfg, seed);
    try {
      const RunLogs logs = run_coupled(
        cfg.world_config(seed), cfg.detector, cfg.latency, cfg.reaction, cfg.duration,
        cfg.run_options());
      write_logs_dir(dir, logs);
      const Summary summary = summarize(
        logs, cfg.detector, cfg.latency, cfg.reaction, cfg.scenario.vehicle_max_decel,
        FootprintSpec::from_scenario(cfg.scenario), cfg.latency_profile, cfg.reaction_profile);
      write_summary_files(dir, summary);
      per_seed.push_back(summary);
      std::cout << "seed " << seed << ": " << logs.collisions.size() << " collisions, "
                << logs.alerts.size() << " alerts -> " << dir.string() << "\n";
    } catch (...) {
      std::error_code ec;
      fs::remove_all(dir, ec);  // no partial outputs
      throw;
    }
  }
  const Summary total = merge_summaries(per_seed);
  write_file(
    fs::path(cfg.out_dir) / "aggregate.txt", [&](std::ostream & os) { write_summary_text(os, total); });
  write_file(
    fs::path(cfg.out_dir) / "aggregate.csv", [&](std::ostream & os) { write_outcomes_table(os, total); });
  write_file(
    fs::path(cfg.out_dir) / "aggregate_alerts.csv",
    [&](std::ostream & os) { write_alert_classes_table(os, total); });
  write_file(
    fs::path(cfg.out_dir) / "aggregate_fp_cdf.csv",
    [&](std::ostream & os) { write_fp_cdf_table(os, total); });
  return kExitOk;
}

int cmd_sweep_thresholds(const CliOverrides & o, const std::string & logs_dir)
{
  const RunConfig cfg = load_with_overrides(o);
  RunLogs logs;
  if (!logs_dir.empty()) {
    logs = read_logs_dir(logs_dir);
  } else {
    // Fresh open-loop run on the first seed.
    CoupledRunOptions opt = cfg.run_options();
    opt.closed_loop = false;
    logs = run_coupled(
      cfg.world_config(cfg.seeds.front()), cfg.detector, cfg.latency, cfg.reaction, cfg.duration,
      opt);
  }
  const SweepResult res = threshold_sweep(
    logs.trajectory, logs.collisions, cfg.sweep_t2c, cfg.sweep_s2c, cfg.reaction, cfg.latency,
    cfg.detector, cfg.scenario.vehicle_max_decel);

  fs::create_directories(cfg.out_dir);
  const auto matrix_of = [&](auto field) {
    std::vector<double> values;
    for (const SweepCell & c : res.cells) values.push_back(field(c));
    return values;
  };
  const std::map<std::string, std::vector<double>> outputs = {
    {"veh_veh_undetected_or_late.csv",
     matrix_of([](const SweepCell & c) { return c.undetected_or_late_pct_vv; })},
    {"veh_veh_false_positive.csv", matrix_of([](const SweepCell & c) { return c.fp_pct_vv; })},
    {"veh_ped_undetected_or_late.csv",
     matrix_of([](const SweepCell & c) { return c.undetected_or_late_pct_vp; })},
    {"veh_ped_false_positive.csv", matrix_of([](const SweepCell & c) { return c.fp_pct_vp; })},
    {"alerted_pairs_veh_veh.csv",
     matrix_of([](const SweepCell & c) { return static_cast<double>(c.alerted_pairs_vv); })},
    {"alerted_pairs_veh_ped.csv",
     matrix_of([](const SweepCell & c) { return static_cast<double>(c.alerted_pairs_vp); })},
  };
  for (const auto & [name, values] : outputs) {
    write_file(fs::path(cfg.out_dir) / name, [&](std::ostream & os) {
      write_matrix(os, res.t2c_grid, res.s2c_grid, values);
    });
  }
  std::cout << "threshold sweep: " << res.cells.size() << " cells -> " << cfg.out_dir << "\n";
  return kExitOk;
}

int cmd_sweep_arrivals(const CliOverrides & o)
{
  const RunConfig cfg = load_with_overrides(o);
  const auto rows = stability_sweep(
    cfg.scenario, cfg.sweep_lambda_v, cfg.sweep_lambda_p, cfg.duration, cfg.sweep_seeds,
    cfg.violation);
  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "stability.csv", [&](std::ostream & os) {
    os << "lambda_v,lambda_p,mean_vehicle_count,ci95\n";
    for (const StabilityRow & r : rows) {
      os << format_double(r.lambda_v) << ',' << format_double(r.lambda_p) << ','
         << format_double(r.mean_vehicle_count) << ',' << format_double(r.ci95) << '\n';
    }
  });
  std::cout << "stability sweep: " << rows.size() << " rows -> " << cfg.out_dir << "\n";
  return kExitOk;
}

int cmd_compare_placement(const CliOverrides & o)
{
  RunConfig cfg = load_with_overrides(o);
  struct Condition
  {
    std::string name;
    Summary summary;
  };
  std::vector<Condition> conditions;
  std::map<std::string, std::vector<AlertRow>> alerts_by_placement;

  for (const std::string placement : {"metro", "cloud"}) {
    cfg.latency_profile = placement;
    cfg.latency = LatencyProfile::by_name(placement);
    std::vector<RunLogs> batch;
    for (std::uint64_t seed : cfg.seeds) {
      CoupledRunOptions opt = cfg.run_options();
      opt.closed_loop = false;  // reaction profiles are compared offline
      batch.push_back(run_coupled(
        cfg.world_config(seed), cfg.detector, cfg.latency, cfg.reaction, cfg.duration, opt));
      const fs::path dir = run_dir(cfg, seed);
      write_logs_dir(dir, batch.back());
      for (const AlertRow & a : batch.back().alerts) alerts_by_placement[placement].push_back(a);
    }
    for (const std::string reaction_name : {"human", "automated"}) {
      const ReactionProfile reaction = ReactionProfile::by_name(reaction_name);
      std::vector<Summary> parts;
      for (const RunLogs & logs : batch) {
        parts.push_back(summarize(
          logs, cfg.detector, cfg.latency, reaction, cfg.scenario.vehicle_max_decel,
          FootprintSpec::from_scenario(cfg.scenario), placement, reaction_name));
      }
      conditions.push_back({placement + "-" + reaction_name, merge_summaries(parts)});
    }
  }

  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "compare_placement.csv", [&](std::ostream & os) {
    os << "metric";
    for (const Condition & c : conditions) os << ',' << c.name;
    os << '\n';
    const auto row = [&](const std::string & metric, auto getter) {
      os << metric;
      for (const Condition & c : conditions) os << ',' << getter(c.summary);
      os << '\n';
    };
    for (PairKind kind : {PairKind::kVehVeh, PairKind::kVehPed}) {
      const std::string k = to_string(kind);
      row(k + "_collisions", [&](const Summary & s) { return std::to_string(s.outcomes(kind).total()); });
      row(k + "_detected_in_time", [&](const Summary & s) { return std::to_string(s.outcomes(kind).in_time); });
      row(k + "_detected_too_late", [&](const Summary & s) { return std::to_string(s.outcomes(kind).late); });
      row(k + "_not_detected", [&](const Summary & s) { return std::to_string(s.outcomes(kind).not_detected); });
      row(k + "_uncoverable", [&](const Summary & s) { return std::to_string(s.outcomes(kind).uncoverable); });
      row(k + "_alerts", [&](const Summary & s) { return std::to_string(s.alerts(kind).total()); });
      row(k + "_false_positives", [&](const Summary & s) { return std::to_string(s.alerts(kind).false_positive); });
    }
  });

  // Per-alert placement deltas for matched alerts (same pair, same ordinal).
  // The transmission-plus-processing delay T_D differs by exactly the
  // backhaul difference; with the uplink also traversing the backhaul the
  // issue time shifts as well.
  const ReactionProfile reaction = cfg.reaction;
  std::map<PairKey, std::vector<const AlertRow *>> metro_by_pair, cloud_by_pair;
  for (const AlertRow & a : alerts_by_placement["metro"]) metro_by_pair[a.pair()].push_back(&a);
  for (const AlertRow & a : alerts_by_placement["cloud"]) cloud_by_pair[a.pair()].push_back(&a);
  write_file(fs::path(cfg.out_dir) / "placement_alert_deltas.csv", [&](std::ostream & os) {
    os << "id_a,id_b,ordinal,issued_metro,issued_cloud,td_metro,td_cloud,td_delta,hmi_delta\n";
    const double td_metro = LatencyProfile::metro().backhaul_latency +
                            LatencyProfile::metro().radio_latency + reaction.processing_time;
    const double td_cloud = LatencyProfile::cloud().backhaul_latency +
                            LatencyProfile::cloud().radio_latency + reaction.processing_time;
    for (const auto & [pair, metro_alerts] : metro_by_pair) {
      auto it = cloud_by_pair.find(pair);
      if (it == cloud_by_pair.end()) continue;
      const std::size_t n = std::min(metro_alerts.size(), it->second.size());
      for (std::size_t k = 0; k < n; ++k) {
        const AlertRow & m = *metro_alerts[k];
        const AlertRow & c = *it->second[k];
        const double hmi_m = m.issued_at + td_metro;
        const double hmi_c = c.issued_at + td_cloud;
        os << pair.a << ',' << pair.b << ',' << k << ',' << format_double(m.issued_at) << ','
           << format_double(c.issued_at) << ',' << format_double(td_metro) << ','
           << format_double(td_cloud) << ',' << format_double(td_cloud - td_metro) << ','
           << format_double(hmi_c - hmi_m) << '\n';
      }
    }
  });
  std::cout << "compare-placement: 4 conditions -> " << cfg.out_dir << "\n";
  return kExitOk;
}

int cmd_analyze(const CliOverrides & o, const std::string & logs_dir)
{
  const RunConfig cfg = load_with_overrides(o);
  if (logs_dir.empty()) throw ConfigError{"analyze requires --logs <dir>"};
  const RunLogs logs = read_logs_dir(logs_dir);
  const Summary summary = summarize(
    logs, cfg.detector, cfg.latency, cfg.reaction, cfg.scenario.vehicle_max_decel,
    FootprintSpec::from_scenario(cfg.scenario), cfg.latency_profile, cfg.reaction_profile);
  const fs::path out = o.out_dir.empty() ? fs::path(logs_dir) : fs::path(cfg.out_dir);
  fs::create_directories(out);
  write_summary_files(out, summary);
  write_summary_text(std::cout, summary);
  return kExitOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"C-V2I collision avoidance simulation suite"};
  app.require_subcommand(1);

  CliOverrides o;
  std::string logs_dir;

  const auto add_common = [&](CLI::App * cmd) {
    cmd->add_option("--config", o.config_path, "key = value run configuration file");
    cmd->add_option("--seed", o.seeds, "seed override (repeatable)");
    cmd->add_option("--duration", o.duration, "simulated seconds per run");
    cmd->add_option("--profile", o.latency_profile, "server placement: metro or cloud");
    cmd->add_option("--reaction", o.reaction_profile, "receiver profile: human or automated");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_flag("--no-alerts", o.no_alerts, "disable the detection service (open-loop baseline)");
  };

  CLI::App * run = app.add_subcommand("run", "simulate the configured seeds and summarize");
  add_common(run);
  CLI::App * sweep_t = app.add_subcommand("sweep-thresholds", "t2c/s2c heatmaps in replay mode");
  add_common(sweep_t);
  sweep_t->add_option("--logs", logs_dir, "existing run directory to replay (default: fresh run)");
  CLI::App * sweep_a = app.add_subcommand("sweep-arrivals", "arrival-rate stability study");
  add_common(sweep_a);
  CLI::App * compare = app.add_subcommand("compare-placement", "metro vs cloud, both reactions");
  add_common(compare);
  CLI::App * analyze = app.add_subcommand("analyze", "re-run analysis on existing logs");
  add_common(analyze);
  analyze->add_option("--logs", logs_dir, "run directory containing the three logs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(o);
    if (sweep_t->parsed()) return cmd_sweep_thresholds(o, logs_dir);
    if (sweep_a->parsed()) return cmd_sweep_arrivals(o);
    if (compare->parsed()) return cmd_compare_placement(o);
    if (analyze->parsed()) return cmd_analyze(o, logs_dir);
  } catch (const ConfigError & e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitConfigError;
}
