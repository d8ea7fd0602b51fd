#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iscc/config.hpp"
#include "iscc/orchestrator.hpp"

namespace iscc {

enum class SweepVariable {
  None,
  OffloadRatio,    // eta
  MecCapacity,     // F_m (cycles/s)
  SinrThreshold,   // Gamma_d (linear)
  NumVehicles,     // K
  NumSubbands,     // L
  MaxPower,        // P_max (W)
  TargetDistance,  // fixed target distance (m)
  CsiError,        // normalized CSI error variance
};

std::string_view sweep_name(SweepVariable v);
std::optional<SweepVariable> parse_sweep(std::string_view name);

/// Copy of `config` with the sweep variable set to `value`.
SystemConfig apply_sweep(SystemConfig config, SweepVariable variable, double value);

struct ExperimentSpec {
  std::vector<Scheme> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  int trials = 50;
  std::uint64_t seed_base = 1;
  SweepVariable sweep = SweepVariable::None;
  std::vector<double> grid;              // ignored when sweep == None
  std::vector<double> detection_ranges;  // m; empty selects 10, 20, ..., 200
  int threads = 0;                       // 0 = hardware concurrency
};

/// Throws ConfigError on an empty scheme list, trials < 1, or an empty or
/// unsorted grid.
void validate(const ExperimentSpec& spec);

/// One (scheme, sweep point, trial) outcome. Every floating-point field is
/// rounded to 9 significant digits, the precision of the CSV files, so
/// aggregates recomputed from persisted records match in-memory ones exactly.
struct TrialRecord {
  Scheme scheme = Scheme::Joint;
  int point = 0;
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool ok = false;  // the run completed without an exception
  std::string error;

  double max_latency = 0.0;
  double initial_objective = 0.0;
  double min_sensing_sinr = 0.0;  // linear, at the minimum detection distance
  bool sensing_ok = false;
  bool feasible = false;
  bool threshold_relaxed = false;
  bool converged = false;
  int outer_iterations = 0;
  std::size_t max_bnb_evaluations = 0;
  std::size_t bnb_limit = 0;

  std::vector<int> band;
  std::vector<double> latency, local_latency, offload_latency, edge_latency;
  std::vector<double> rate, sensing_sinr, detection, tx_power, local_cpu, mec_cpu;
  std::vector<double> detection_curve;  // mean P_D per detection range

  double wall_seconds = 0.0;  // in memory only; never written
};

struct PointAggregate {
  Scheme scheme = Scheme::Joint;
  int point = 0;
  double sweep_value = 0.0;
  int trials = 0;
  int failures = 0;
  double mean_max_latency = 0.0;
  double max_max_latency = 0.0;
  double mean_min_sensing_sinr_db = 0.0;
  double feasibility_rate = 0.0;  // all constraints, over completed trials
  int sensing_feasible_instances = 0;
  double sensing_feasibility_rate = 0.0;  // over sensing-feasible instances
  double mean_detection_dmin = 0.0;
  double convergence_rate = 0.0;
  double mean_outer_iterations = 0.0;
  std::vector<double> latency_cdf;       // per-vehicle T_k, sorted
  std::vector<double> sensing_cdf_db;    // per-vehicle gamma_k in dB, sorted
  std::vector<double> detection_curve;   // mean P_D per detection range
  double mean_wall_seconds = 0.0;
};

struct AggregateResult {
  ExperimentSpec spec;
  SystemConfig config;
  std::vector<double> points;  // sweep values (a single 0 when not sweeping)
  std::vector<double> detection_ranges;
  std::vector<TrialRecord> records;  // ordered by (point, trial, scheme)
  std::vector<PointAggregate> aggregates;  // ordered by (point, scheme)
};

/// Mean detection probability across vehicles with every echo amplitude
/// re-evaluated at each range (powers and allocation unchanged).
std::vector<double> detection_curve(const RunResult& run, const Scenario& scenario,
                                    const std::vector<double>& ranges);

/// Runs every scheme on every (sweep point, trial) instance; trial t uses
/// seed seed_base + t at every sweep point. Deterministic for any thread count.
AggregateResult run_experiment(const ExperimentSpec& spec, const SystemConfig& config);

/// Recomputes the per-point aggregates from the trial records.
void aggregate(AggregateResult& result);

/// Writes raw.csv, trials.csv, aggregate.csv, cdf.csv, detection.csv,
/// detection_trials.csv and manifest.json into `dir` (created if needed).
void write_outputs(const AggregateResult& result, const std::string& dir);

/// Reads the records back from raw.csv, trials.csv and detection_trials.csv.
std::vector<TrialRecord> read_records(const std::string& dir);

/// Rounds to 9 significant digits.
double round9(double x);

}  // namespace iscc
