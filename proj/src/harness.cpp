#include "iscc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "iscc/metrics.hpp"

namespace iscc {
namespace {

constexpr const char* kVersion = "1.0.0";

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  std::vector<double> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = round9(v[i]);
  return out;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double to_db(double x) { return 10.0 * std::log10(x); }

TrialRecord make_record(Scheme scheme, const RunResult& run, const Scenario& scenario,
                        const std::vector<double>& ranges) {
  TrialRecord r;
  r.scheme = scheme;
  r.ok = true;
  const auto& rep = run.report;
  r.max_latency = round9(rep.objective);
  r.initial_objective = round9(run.initial_objective);
  r.min_sensing_sinr = round9(rep.sensing_sinr.minCoeff());
  r.sensing_ok = rep.feasibility.sensing_ok;
  r.feasible = rep.feasibility.ok();
  r.threshold_relaxed = run.threshold_relaxed;
  r.converged = run.converged;
  r.outer_iterations = static_cast<int>(run.trace.size());
  for (std::size_t e : run.bnb_evaluations) r.max_bnb_evaluations = std::max(r.max_bnb_evaluations, e);
  r.bnb_limit = run.bnb_evaluation_limit;
  r.band = run.allocation.bands();
  r.latency = to_vector(rep.latency);
  r.local_latency = to_vector(rep.local_latency);
  r.offload_latency = to_vector(rep.offload_latency);
  r.edge_latency = to_vector(rep.edge_latency);
  r.rate = to_vector(rep.rate);
  r.sensing_sinr = to_vector(rep.sensing_sinr);
  r.detection = to_vector(rep.detection);
  r.tx_power = to_vector(run.decision.tx_power);
  r.local_cpu = to_vector(run.decision.local_cpu);
  r.mec_cpu = to_vector(run.decision.mec_cpu);
  r.detection_curve = detection_curve(run, scenario, ranges);
  for (double& x : r.detection_curve) x = round9(x);
  return r;
}

// ---------------------------------------------------------------------------
// CSV helpers
// ---------------------------------------------------------------------------

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(split(line));
  }
  return rows;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

double round9(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(fmt(x).c_str(), nullptr);
}

std::string_view sweep_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::None: return "none";
    case SweepVariable::OffloadRatio: return "eta";
    case SweepVariable::MecCapacity: return "mec_capacity";
    case SweepVariable::SinrThreshold: return "sinr_threshold";
    case SweepVariable::NumVehicles: return "num_vehicles";
    case SweepVariable::NumSubbands: return "num_subbands";
    case SweepVariable::MaxPower: return "max_power";
    case SweepVariable::TargetDistance: return "target_distance";
    case SweepVariable::CsiError: return "csi_error";
  }
  return "none";
}

std::optional<SweepVariable> parse_sweep(std::string_view name) {
  for (auto v : {SweepVariable::None, SweepVariable::OffloadRatio, SweepVariable::MecCapacity,
                 SweepVariable::SinrThreshold, SweepVariable::NumVehicles, SweepVariable::NumSubbands,
                 SweepVariable::MaxPower, SweepVariable::TargetDistance, SweepVariable::CsiError}) {
    if (sweep_name(v) == name) return v;
  }
  if (name == "offload_ratio") return SweepVariable::OffloadRatio;
  return std::nullopt;
}

SystemConfig apply_sweep(SystemConfig c, SweepVariable variable, double value) {
  switch (variable) {
    case SweepVariable::None: break;
    case SweepVariable::OffloadRatio: c.offload_ratio = value; break;
    case SweepVariable::MecCapacity: c.mec_capacity = value; break;
    case SweepVariable::SinrThreshold: c.sinr_threshold = value; break;
    case SweepVariable::NumVehicles: c.num_vehicles = static_cast<int>(std::lround(value)); break;
    case SweepVariable::NumSubbands: c.num_subbands = static_cast<int>(std::lround(value)); break;
    case SweepVariable::MaxPower: c.max_power = value; break;
    case SweepVariable::TargetDistance: c.target_distance = value; break;
    case SweepVariable::CsiError: c.csi_error = value; break;
  }
  return c;
}

void validate(const ExperimentSpec& spec) {
  if (spec.schemes.empty()) throw ConfigError("experiment needs at least one scheme");
  if (spec.trials < 1) throw ConfigError("experiment needs at least one trial");
  if (spec.sweep != SweepVariable::None) {
    if (spec.grid.empty()) throw ConfigError("sweep grid is empty");
    if (!std::is_sorted(spec.grid.begin(), spec.grid.end())) throw ConfigError("sweep grid must be sorted");
  }
}

std::vector<double> detection_curve(const RunResult& run, const Scenario& scenario,
                                    const std::vector<double>& ranges) {
  const auto& c = scenario.config;
  const int K = run.allocation.num_vehicles();
  std::vector<double> curve;
  curve.reserve(ranges.size());
  for (double d : ranges) {
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      const double amp = sensing_amplitude(c.ref_pathloss, c.tx_gain, c.rx_aperture, scenario.channels.rcs[k], d);
      const double gamma = sensing_sinr(k, run.allocation, run.decision.tx_power, scenario, amp);
      total += detection_probability(gamma, c.false_alarm);
    }
    curve.push_back(K > 0 ? total / K : 0.0);
  }
  return curve;
}

AggregateResult run_experiment(const ExperimentSpec& spec, const SystemConfig& config) {
  validate(spec);
  AggregateResult result;
  result.spec = spec;
  result.config = config;
  result.points = spec.sweep == SweepVariable::None ? std::vector<double>{0.0} : spec.grid;
  result.detection_ranges = spec.detection_ranges;
  if (result.detection_ranges.empty()) {
    for (int d = 10; d <= 200; d += 10) result.detection_ranges.push_back(d);
  }

  std::vector<SystemConfig> configs;
  for (double v : result.points) {
    configs.push_back(apply_sweep(config, spec.sweep, v));
    const auto problems = validate(configs.back());
    if (!problems.empty()) throw ConfigError("sweep point " + fmt(v) + ": " + problems.front());
  }

  const int P = static_cast<int>(result.points.size());
  const int T = spec.trials;
  const int S = static_cast<int>(spec.schemes.size());
  result.records.resize(static_cast<std::size_t>(P) * T * S);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int task = next++; task < P * T; task = next++) {
      const int point = task / T;
      const int trial = task % T;
      const std::uint64_t seed = spec.seed_base + static_cast<std::uint64_t>(trial);
      std::optional<Scenario> scenario;
      std::string setup_error;
      try {
        scenario = make_scenario(configs[point], seed);
      } catch (const std::exception& e) {
        setup_error = e.what();
      }
      for (int s = 0; s < S; ++s) {
        TrialRecord& rec = result.records[(static_cast<std::size_t>(point) * T + trial) * S + s];
        const auto start = std::chrono::steady_clock::now();
        if (scenario) {
          try {
            rec = make_record(spec.schemes[s], run_scheme(spec.schemes[s], *scenario), *scenario,
                              result.detection_ranges);
          } catch (const std::exception& e) {
            rec = TrialRecord{};
            rec.error = e.what();
          }
        } else {
          rec.error = setup_error;
        }
        rec.scheme = spec.schemes[s];
        rec.point = point;
        rec.sweep_value = result.points[point];
        rec.trial = trial;
        rec.seed = seed;
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    }
  };

  int threads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, P * T);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  aggregate(result);
  return result;
}

void aggregate(AggregateResult& result) {
  const auto& spec = result.spec;
  const int P = static_cast<int>(result.points.size());

  // An instance counts as sensing-feasible when some sensing-aware scheme met
  // the threshold on it without relaxing it.
  std::map<std::pair<int, int>, bool> instance_ok;
  for (const auto& r : result.records) {
    auto& flag = instance_ok[{r.point, r.trial}];
    if (r.ok && r.scheme != Scheme::Ccra && r.sensing_ok && !r.threshold_relaxed) flag = true;
  }

  result.aggregates.clear();
  for (int point = 0; point < P; ++point) {
    for (Scheme scheme : spec.schemes) {
      PointAggregate a;
      a.scheme = scheme;
      a.point = point;
      a.sweep_value = result.points[point];
      a.detection_curve.assign(result.detection_ranges.size(), 0.0);
      std::vector<double> max_lat, min_sinr_db, det;
      int feasible = 0, converged = 0, sensing_hits = 0;
      double iterations = 0.0, wall = 0.0;
      for (const auto& r : result.records) {
        if (r.point != point || r.scheme != scheme) continue;
        ++a.trials;
        wall += r.wall_seconds;
        if (!r.ok) {
          ++a.failures;
          continue;
        }
        max_lat.push_back(r.max_latency);
        min_sinr_db.push_back(to_db(r.min_sensing_sinr));
        det.push_back(mean(r.detection));
        feasible += r.feasible;
        converged += r.converged;
        iterations += r.outer_iterations;
        if (instance_ok[{r.point, r.trial}]) {
          ++a.sensing_feasible_instances;
          sensing_hits += r.sensing_ok && !r.threshold_relaxed;
        }
        a.latency_cdf.insert(a.latency_cdf.end(), r.latency.begin(), r.latency.end());
        for (double g : r.sensing_sinr) a.sensing_cdf_db.push_back(to_db(g));
        for (std::size_t i = 0; i < r.detection_curve.size() && i < a.detection_curve.size(); ++i) {
          a.detection_curve[i] += r.detection_curve[i];
        }
      }
      const int done = a.trials - a.failures;
      if (done > 0) {
        a.mean_max_latency = mean(max_lat);
        a.max_max_latency = *std::max_element(max_lat.begin(), max_lat.end());
        a.mean_min_sensing_sinr_db = mean(min_sinr_db);
        a.feasibility_rate = static_cast<double>(feasible) / done;
        a.mean_detection_dmin = mean(det);
        a.convergence_rate = static_cast<double>(converged) / done;
        a.mean_outer_iterations = iterations / done;
        for (double& x : a.detection_curve) x /= done;
      }
      a.sensing_feasibility_rate =
          a.sensing_feasible_instances > 0 ? static_cast<double>(sensing_hits) / a.sensing_feasible_instances : 0.0;
      a.mean_wall_seconds = a.trials > 0 ? wall / a.trials : 0.0;
      std::sort(a.latency_cdf.begin(), a.latency_cdf.end());
      std::sort(a.sensing_cdf_db.begin(), a.sensing_cdf_db.end());
      result.aggregates.push_back(std::move(a));
    }
  }
}

void write_outputs(const AggregateResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);
  const std::string var(sweep_name(result.spec.sweep));

  {
    auto out = open_out(root / "trials.csv");
    out << "scheme,sweep_variable,sweep_value,trial,seed,status,error,max_latency,initial_objective,"
           "min_sensing_sinr,sensing_ok,feasible,threshold_relaxed,converged,outer_iterations,"
           "max_bnb_evaluations,bnb_limit\n";
    for (const auto& r : result.records) {
      out << scheme_name(r.scheme) << ',' << var << ',' << fmt(r.sweep_value) << ',' << r.trial << ',' << r.seed
          << ',' << (r.ok ? "ok" : "error") << ',' << sanitize(r.error) << ',' << fmt(r.max_latency) << ','
          << fmt(r.initial_objective) << ',' << fmt(r.min_sensing_sinr) << ',' << r.sensing_ok << ','
          << r.feasible << ',' << r.threshold_relaxed << ',' << r.converged << ',' << r.outer_iterations << ','
          << r.max_bnb_evaluations << ',' << r.bnb_limit << '\n';
    }
  }
  {
    auto out = open_out(root / "raw.csv");
    out << "scheme,sweep_variable,sweep_value,trial,seed,vehicle,band,latency,local_latency,offload_latency,"
           "edge_latency,rate,sensing_sinr,detection,tx_power,local_cpu,mec_cpu\n";
    for (const auto& r : result.records) {
      for (std::size_t k = 0; k < r.latency.size(); ++k) {
        out << scheme_name(r.scheme) << ',' << var << ',' << fmt(r.sweep_value) << ',' << r.trial << ','
            << r.seed << ',' << k << ',' << r.band[k] << ',' << fmt(r.latency[k]) << ','
            << fmt(r.local_latency[k]) << ',' << fmt(r.offload_latency[k]) << ',' << fmt(r.edge_latency[k])
            << ',' << fmt(r.rate[k]) << ',' << fmt(r.sensing_sinr[k]) << ',' << fmt(r.detection[k]) << ','
            << fmt(r.tx_power[k]) << ',' << fmt(r.local_cpu[k]) << ',' << fmt(r.mec_cpu[k]) << '\n';
      }
    }
  }
  {
    auto out = open_out(root / "detection_trials.csv");
    out << "scheme,sweep_variable,sweep_value,trial,distance,mean_detection\n";
    for (const auto& r : result.records) {
      for (std::size_t i = 0; i < r.detection_curve.size(); ++i) {
        out << scheme_name(r.scheme) << ',' << var << ',' << fmt(r.sweep_value) << ',' << r.trial << ','
            << fmt(result.detection_ranges[i]) << ',' << fmt(r.detection_curve[i]) << '\n';
      }
    }
  }
  {
    auto out = open_out(root / "aggregate.csv");
    out << "scheme,sweep_variable,sweep_value,trials,failures,mean_max_latency,max_max_latency,"
           "mean_min_sensing_sinr_db,feasibility_rate,sensing_feasible_instances,sensing_feasibility_rate,"
           "mean_detection_dmin,convergence_rate,mean_outer_iterations\n";
    for (const auto& a : result.aggregates) {
      out << scheme_name(a.scheme) << ',' << var << ',' << fmt(a.sweep_value) << ',' << a.trials << ','
          << a.failures << ',' << fmt(a.mean_max_latency) << ',' << fmt(a.max_max_latency) << ','
          << fmt(a.mean_min_sensing_sinr_db) << ',' << fmt(a.feasibility_rate) << ','
          << a.sensing_feasible_instances << ',' << fmt(a.sensing_feasibility_rate) << ','
          << fmt(a.mean_detection_dmin) << ',' << fmt(a.convergence_rate) << ',' << fmt(a.mean_outer_iterations)
          << '\n';
    }
  }
  {
    auto out = open_out(root / "cdf.csv");
    out << "scheme,sweep_variable,sweep_value,quantity,rank,probability,value\n";
    for (const auto& a : result.aggregates) {
      auto emit = [&](const char* what, const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          out << scheme_name(a.scheme) << ',' << var << ',' << fmt(a.sweep_value) << ',' << what << ',' << i + 1
              << ',' << fmt(static_cast<double>(i + 1) / v.size()) << ',' << fmt(v[i]) << '\n';
        }
      };
      emit("latency", a.latency_cdf);
      emit("sensing_sinr_db", a.sensing_cdf_db);
    }
  }
  {
    auto out = open_out(root / "detection.csv");
    out << "scheme,sweep_variable,sweep_value,distance,mean_detection\n";
    for (const auto& a : result.aggregates) {
      for (std::size_t i = 0; i < a.detection_curve.size(); ++i) {
        out << scheme_name(a.scheme) << ',' << var << ',' << fmt(a.sweep_value) << ','
            << fmt(result.detection_ranges[i]) << ',' << fmt(a.detection_curve[i]) << '\n';
      }
    }
  }
  {
    nlohmann::ordered_json m;
    m["tool"] = "iscc_sim";
    m["version"] = kVersion;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    std::istringstream text(to_text(result.config));
    std::string line;
    while (std::getline(text, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(' '));
        s.erase(s.find_last_not_of(' ') + 1);
        return s;
      };
      cfg[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    m["config"] = cfg;
    std::vector<std::string> schemes;
    for (Scheme s : result.spec.schemes) schemes.emplace_back(scheme_name(s));
    m["schemes"] = schemes;
    m["trials"] = result.spec.trials;
    m["seed_base"] = result.spec.seed_base;
    m["trial_seeds"] = "seed_base + trial";
    m["sweep_variable"] = var;
    std::vector<std::string> grid;
    for (double v : result.points) grid.push_back(fmt(v));
    m["sweep_grid"] = grid;
    std::vector<std::string> ranges;
    for (double v : result.detection_ranges) ranges.push_back(fmt(v));
    m["detection_ranges"] = ranges;
    m["files"] = {"raw.csv", "trials.csv", "aggregate.csv", "cdf.csv", "detection.csv", "detection_trials.csv"};
    auto out = open_out(root / "manifest.json");
    out << m.dump(2) << '\n';
  }
}

std::vector<TrialRecord> read_records(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::vector<TrialRecord> records;
  std::map<std::tuple<std::string, std::string, int>, std::size_t> index;
  std::map<std::string, int> point_of;

  for (const auto& row : read_csv(root / "trials.csv")) {
    if (row.size() < 17) throw std::runtime_error("malformed trials.csv row");
    TrialRecord r;
    const auto scheme = parse_scheme(row[0]);
    if (!scheme) throw std::runtime_error("unknown scheme in trials.csv: " + row[0]);
    r.scheme = *scheme;
    r.sweep_value = std::stod(row[2]);
    if (!point_of.count(row[2])) {
      const int next = static_cast<int>(point_of.size());
      point_of[row[2]] = next;
    }
    r.point = point_of[row[2]];
    r.trial = std::stoi(row[3]);
    r.seed = std::stoull(row[4]);
    r.ok = row[5] == "ok";
    r.error = row[6];
    r.max_latency = std::stod(row[7]);
    r.initial_objective = std::stod(row[8]);
    r.min_sensing_sinr = std::stod(row[9]);
    r.sensing_ok = row[10] == "1";
    r.feasible = row[11] == "1";
    r.threshold_relaxed = row[12] == "1";
    r.converged = row[13] == "1";
    r.outer_iterations = std::stoi(row[14]);
    r.max_bnb_evaluations = std::stoull(row[15]);
    r.bnb_limit = std::stoull(row[16]);
    index[{row[0], row[2], r.trial}] = records.size();
    records.push_back(std::move(r));
  }
  for (const auto& row : read_csv(root / "raw.csv")) {
    auto& r = records.at(index.at({row[0], row[2], std::stoi(row[3])}));
    r.band.push_back(std::stoi(row[6]));
    r.latency.push_back(std::stod(row[7]));
    r.local_latency.push_back(std::stod(row[8]));
    r.offload_latency.push_back(std::stod(row[9]));
    r.edge_latency.push_back(std::stod(row[10]));
    r.rate.push_back(std::stod(row[11]));
    r.sensing_sinr.push_back(std::stod(row[12]));
    r.detection.push_back(std::stod(row[13]));
    r.tx_power.push_back(std::stod(row[14]));
    r.local_cpu.push_back(std::stod(row[15]));
    r.mec_cpu.push_back(std::stod(row[16]));
  }
  for (const auto& row : read_csv(root / "detection_trials.csv")) {
    records.at(index.at({row[0], row[2], std::stoi(row[3])})).detection_curve.push_back(std::stod(row[5]));
  }
  return records;
}

}  // namespace iscc
