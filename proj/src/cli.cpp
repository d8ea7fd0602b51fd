#include "iscc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "iscc/config.hpp"
#include "iscc/harness.hpp"
#include "iscc/oracles.hpp"
#include "iscc/orchestrator.hpp"

namespace iscc {
namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string profile = "desk";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App& cmd, Common& c) {
  cmd.add_option("--config", c.config_path, "key = value config file");
  cmd.add_option("--set", c.overrides, "override one key (key=value), repeatable");
  cmd.add_option("--profile", c.profile, "base parameter set")->check(CLI::IsMember({"desk", "paper"}));
  cmd.add_option("--seed", c.seed, "seed (base seed for sweeps)");
}

SystemConfig build_config(const Common& c) {
  SystemConfig cfg = c.profile == "paper" ? paper_profile() : desk_profile();
  if (!c.config_path.empty()) cfg = load_config(c.config_path, cfg);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) cfg.rng_seed = *c.seed;
  return cfg;
}

std::string g9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::vector<Scheme> parse_schemes(const std::vector<std::string>& tags) {
  std::vector<Scheme> out;
  for (const auto& list : tags) {
    std::stringstream in(list);
    std::string tag;
    while (std::getline(in, tag, ',')) {
      if (tag.empty()) continue;
      if (tag == "all") {
        out.assign(kAllSchemes.begin(), kAllSchemes.end());
        continue;
      }
      const auto s = parse_scheme(tag);
      if (!s) throw ConfigError("unknown scheme '" + tag + "'");
      if (std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(*s);
    }
  }
  return out;
}

void print_aggregates(const AggregateResult& r, std::ostream& out) {
  out << "scheme  " << sweep_name(r.spec.sweep)
      << "  trials  failures  mean_max_latency  min_sinr_db  feasible  sensing_ok  pd_dmin  converged  wall_s\n";
  for (const auto& a : r.aggregates) {
    out << scheme_name(a.scheme) << "  " << g9(a.sweep_value) << "  " << a.trials << "  " << a.failures << "  "
        << g9(a.mean_max_latency) << "  " << g9(a.mean_min_sensing_sinr_db) << "  " << g9(a.feasibility_rate)
        << "  " << g9(a.sensing_feasibility_rate) << "  " << g9(a.mean_detection_dmin) << "  "
        << g9(a.convergence_rate) << "  " << g9(a.mean_wall_seconds) << '\n';
  }
}

int cmd_run(const Common& common, const std::string& scheme_tag, const std::string& out_dir, std::ostream& out,
            std::ostream& err) {
  const SystemConfig cfg = build_config(common);
  if (const auto problems = validate(cfg); !problems.empty()) {
    for (const auto& p : problems) err << "invalid config: " << p << '\n';
    return kExitValidation;
  }
  const auto scheme = parse_scheme(scheme_tag);
  if (!scheme) throw ConfigError("unknown scheme '" + scheme_tag + "'");

  ExperimentSpec spec;
  spec.schemes = {*scheme};
  spec.trials = 1;
  spec.seed_base = cfg.rng_seed;
  spec.threads = 1;
  const AggregateResult result = run_experiment(spec, cfg);
  const TrialRecord& r = result.records.front();
  if (!r.ok) {
    err << "run failed: " << r.error << '\n';
    return kExitInternal;
  }
  if (!out_dir.empty()) write_outputs(result, out_dir);

  out << "scheme " << scheme_name(r.scheme) << "  seed " << r.seed << '\n';
  out << "max latency " << g9(r.max_latency) << " s (initial " << g9(r.initial_objective) << " s), outer iterations "
      << r.outer_iterations << (r.converged ? ", converged" : ", not converged") << '\n';
  out << "feasible " << (r.feasible ? "yes" : "no") << ", sensing threshold "
      << (r.sensing_ok ? "met" : "violated") << (r.threshold_relaxed ? " (relaxed during optimization)" : "") << '\n';
  out << "vehicle  band  latency_s  local_s  offload_s  edge_s  rate_bps  sensing_sinr  p_detect  tx_power_w"
         "  local_cpu  mec_cpu\n";
  for (std::size_t k = 0; k < r.latency.size(); ++k) {
    out << k << "  " << r.band[k] << "  " << g9(r.latency[k]) << "  " << g9(r.local_latency[k]) << "  "
        << g9(r.offload_latency[k]) << "  " << g9(r.edge_latency[k]) << "  " << g9(r.rate[k]) << "  "
        << g9(r.sensing_sinr[k]) << "  " << g9(r.detection[k]) << "  " << g9(r.tx_power[k]) << "  "
        << g9(r.local_cpu[k]) << "  " << g9(r.mec_cpu[k]) << '\n';
  }
  out << "wall clock " << g9(r.wall_seconds) << " s\n";
  return r.sensing_ok && !r.threshold_relaxed ? kExitOk : kExitInfeasible;
}

int cmd_sweep(const Common& common, const std::vector<std::string>& schemes, int trials, const std::string& var,
              const std::vector<double>& grid, int threads, const std::string& out_dir, std::ostream& out,
              std::ostream& err) {
  const SystemConfig cfg = build_config(common);
  if (const auto problems = validate(cfg); !problems.empty()) {
    for (const auto& p : problems) err << "invalid config: " << p << '\n';
    return kExitValidation;
  }
  ExperimentSpec spec;
  if (!schemes.empty()) spec.schemes = parse_schemes(schemes);
  spec.trials = trials;
  spec.seed_base = cfg.rng_seed;
  spec.threads = threads;
  const auto sweep = parse_sweep(var);
  if (!sweep) throw ConfigError("unknown sweep variable '" + var + "'");
  spec.sweep = *sweep;
  spec.grid = grid;
  validate(spec);

  const auto start = std::chrono::steady_clock::now();
  const AggregateResult result = run_experiment(spec, cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_outputs(result, out_dir);
  print_aggregates(result, out);
  out << "wrote " << out_dir << " (" << result.records.size() << " trial records, " << g9(wall) << " s)\n";
  return kExitOk;
}

int cmd_oracle(const Common& common, std::ostream& out) {
  const SystemConfig cfg = build_config(common);
  const auto outcomes = oracles::run_oracle_suites(cfg, cfg.rng_seed);
  bool all = true;
  for (const auto& o : outcomes) {
    out << (o.pass ? "PASS " : "FAIL ") << o.suite << ": " << o.detail << '\n';
    all = all && o.pass;
  }
  return all ? kExitOk : kExitInternal;
}

int cmd_report(const std::string& dir, std::ostream& out, std::ostream& err) {
  const std::filesystem::path path = std::filesystem::path(dir) / "aggregate.csv";
  std::ifstream in(path);
  if (!in) {
    err << "cannot open " << path.string() << '\n';
    return kExitValidation;
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream s(line);
    std::string field;
    while (std::getline(s, field, ',')) row.push_back(field);
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << std::string(width[i] - row[i].size() + 2, ' ');
    }
    out << '\n';
  }
  return kExitOk;
}

int cmd_validate(const Common& common, std::ostream& out, std::ostream& err) {
  const SystemConfig cfg = build_config(common);
  const auto problems = validate(cfg);
  for (const auto& p : problems) err << "invalid config: " << p << '\n';
  if (!problems.empty()) return kExitValidation;
  out << "config ok\n" << to_text(cfg);
  return kExitOk;
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint sensing, offloading and computing resource allocation for V2X networks"};
  app.require_subcommand(1);

  Common common;
  std::string scheme = "JOINT", out_dir, in_dir = "out", sweep_var = "none";
  std::vector<std::string> schemes;
  std::vector<double> grid;
  int trials = 50, threads = 0;

  auto* run = app.add_subcommand("run", "optimize one instance with one scheme and print the trial report");
  add_common(*run, common);
  run->add_option("--scheme", scheme, "JOINT, CCRA, SCRA, RSBA, FPCR or MRC");
  run->add_option("--out", out_dir, "also write CSV records and a manifest here");

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo experiment over a parameter grid");
  add_common(*sweep, common);
  sweep->add_option("--scheme", schemes, "scheme tags (comma list or repeated); default all");
  sweep->add_option("--trials", trials, "instances per sweep point")->check(CLI::PositiveNumber);
  sweep->add_option("--sweep", sweep_var,
                    "none, eta, mec_capacity, sinr_threshold, num_vehicles, num_subbands, max_power, "
                    "target_distance");
  sweep->add_option("--grid", grid, "sweep values in linear units")->delimiter(',');
  sweep->add_option("--threads", threads, "worker threads (0 = all cores)");
  sweep->add_option("--out", out_dir, "output directory")->required();

  auto* oracle = app.add_subcommand("oracle-check", "run the reference-solution checks");
  add_common(*oracle, common);

  auto* report = app.add_subcommand("report", "print aggregate.csv of a sweep as a table");
  report->add_option("--in", in_dir, "sweep output directory");

  auto* check = app.add_subcommand("validate-config", "check configuration invariants");
  add_common(*check, common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (run->parsed()) return cmd_run(common, scheme, out_dir, out, err);
    if (sweep->parsed()) return cmd_sweep(common, schemes, trials, sweep_var, grid, threads, out_dir, out, err);
    if (oracle->parsed()) return cmd_oracle(common, out);
    if (report->parsed()) return cmd_report(in_dir, out, err);
    if (check->parsed()) return cmd_validate(common, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

int parse_and_dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return parse_and_dispatch(args, std::cout, std::cerr);
}

}  // namespace iscc
