#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sgpnet/baselines.hpp"
#include "sgpnet/scenario.hpp"

namespace sgpnet {

// A preset name, or an instance spelled out in the config.
struct ScenarioSpec {
  std::string name;
  std::optional<NetworkSpec> spec;  // inline instance
  std::optional<TaskSet> tasks;
};

struct ExperimentConfig {
  std::vector<ScenarioSpec> scenarios;
  std::vector<std::string> algorithms;  // SGP, GP, SPOO, LCOR, LPR, ORACLE
  std::vector<std::uint64_t> seeds;
  std::vector<double> rate_scales{1.0};
  std::vector<double> result_ratios;  // a_m = L+/L-, empty keeps sampled sizes
  std::vector<Event> events;          // event node is an original node label
  std::string output_dir = "out";
  double tol = 1e-4;
  int max_iters = 1000;
  std::vector<double> gp_betas{1.0};  // GP runs once per beta
  Schedule schedule = Schedule::Synchronous;
  Curvature_mode curvature = Curvature_mode::Local;
  double lpr_saturation = 0.7;
  bool deterministic = false;  // suppress the timestamp line in outputs
};

// Parses the JSON config document; throws ConfigError with a readable reason.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

struct Metrics {
  double L_data = 0.0;    // average hops per data packet before computation
  double L_result = 0.0;  // average hops per result packet
};
// Throws ZeroDenominator when no traffic is injected or computed.
Metrics compute_metrics(const FlowState& flow, const TaskSet& tasks);

struct RunRow {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string algorithm;
  double T_final = kInf;
  int iters = 0;
  bool converged = false;
  double L_data = kInf;
  double L_result = kInf;
  double wall_ms = 0.0;
  std::string status = "ok";  // ok, max_iters, infeasible, error: ...
  std::string strategy_file;  // relative to output_dir, empty if none
};

struct ExperimentResult {
  std::vector<RunRow> rows;
  int exit_code = 0;  // 0 all converged, 2 some hit max_iters, 4 infeasible instance
};

// Runs every (scenario, sweep point, seed, algorithm) tuple and writes
// trace.csv, summary.csv, normalized.csv and one strategy file per run under
// output_dir. Errors in one run are recorded and the rest continue.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// Strategy dump: one line per (node, task) with the data row then the result
// row, 12 significant digits. Labels are node ids of the network the run ended on.
void write_strategy(const std::string& path, const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s);
Strategy read_strategy(const std::string& path, const NetworkSpec& spec, const TaskSet& tasks);

// Instance a summary row was produced on (preset sample with sweeps applied,
// or the inline instance), before any failure event.
struct PreparedInstance {
  NetworkSpec spec;
  TaskSet tasks;
  std::optional<Strategy> init;  // sampling start, kept when no sweep changed the instance
};
PreparedInstance prepare_instance(const ScenarioSpec& sc, std::uint64_t seed, double rate_scale,
                                  std::optional<double> result_ratio);

}  // namespace sgpnet
