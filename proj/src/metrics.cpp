#include "iscc/metrics.hpp"

#include <cmath>
#include <limits>

#include "iscc/linalg.hpp"

namespace iscc {

Eigen::MatrixXcd interference_plus_noise(int k, int l, const Allocation& alloc, const Eigen::VectorXd& powers,
                                         const Scenario& scenario) {
  const auto& ch = scenario.channels;
  const int m = scenario.association.serving_bs[k];
  const auto& H = ch.uplink(l, m);
  Eigen::MatrixXcd d = scenario.config.noise_power_bs *
                       Eigen::MatrixXcd::Identity(ch.num_antennas(), ch.num_antennas());
  for (int i = 0; i < alloc.num_vehicles(); ++i) {
    if (i == k || alloc.band(i) != l) continue;
    d.noalias() += powers[i] * H.col(i) * H.col(i).adjoint();
  }
  return d;
}

double uplink_sinr(int k, const Allocation& alloc, const Eigen::VectorXd& powers, const Eigen::VectorXcd& u,
                   const Scenario& scenario) {
  const int l = alloc.band(k);
  if (l < 0) return 0.0;
  const int m = scenario.association.serving_bs[k];
  const auto& H = scenario.channels.uplink(l, m);
  const Eigen::MatrixXcd d = interference_plus_noise(k, l, alloc, powers, scenario);
  return powers[k] * rayleigh_quotient(u, H.col(k), d);
}

double offload_rate(int k, const Allocation& alloc, const ResourceDecision& decision, const Scenario& scenario) {
  if (alloc.band(k) < 0) return 0.0;
  const Eigen::VectorXcd u = decision.beamformers.col(k);
  const double sinr = uplink_sinr(k, alloc, decision.tx_power, u, scenario);
  return scenario.config.subband_bandwidth * std::log2(1.0 + sinr);
}

Eigen::VectorXd offload_rates(const Allocation& alloc, const ResourceDecision& decision, const Scenario& scenario) {
  Eigen::VectorXd r(alloc.num_vehicles());
  for (int k = 0; k < alloc.num_vehicles(); ++k) r[k] = offload_rate(k, alloc, decision, scenario);
  return r;
}

double sensing_sinr(int k, const Allocation& alloc, const Eigen::VectorXd& powers, const Scenario& scenario,
                    double amplitude) {
  const int l = alloc.band(k);
  if (l < 0) return 0.0;
  const auto& g = scenario.channels.cross(l);
  double interference = scenario.config.noise_power_radar;
  for (int i = 0; i < alloc.num_vehicles(); ++i) {
    if (i == k || alloc.band(i) != l) continue;
    interference += powers[i] * std::norm(g(i, k));
  }
  return scenario.config.accum_symbols * powers[k] * amplitude * amplitude / interference;
}

double sensing_sinr(int k, const Allocation& alloc, const Eigen::VectorXd& powers, const Scenario& scenario,
                    SensingRange range) {
  const auto& ch = scenario.channels;
  const double amp = range == SensingRange::MinDistance ? ch.sensing_amp_min[k] : ch.sensing_amp[k];
  return sensing_sinr(k, alloc, powers, scenario, amp);
}

Eigen::VectorXd sensing_sinrs(const Allocation& alloc, const Eigen::VectorXd& powers, const Scenario& scenario,
                              SensingRange range) {
  Eigen::VectorXd g(alloc.num_vehicles());
  for (int k = 0; k < alloc.num_vehicles(); ++k) g[k] = sensing_sinr(k, alloc, powers, scenario, range);
  return g;
}

LatencySplit latencies(int k, double rate, const ResourceDecision& decision, const Scenario& scenario) {
  const auto& c = scenario.config;
  const double bits = scenario.task_bits[k];
  const double inf = std::numeric_limits<double>::infinity();
  const double offloaded = c.offload_ratio * bits;
  LatencySplit t;
  t.local = decision.local_cpu[k] > 0.0 ? bits * c.local_intensity / decision.local_cpu[k] : inf;
  t.offload = rate > 0.0 ? offloaded / rate : inf;
  t.edge = decision.mec_cpu[k] > 0.0 ? offloaded * c.mec_intensity / decision.mec_cpu[k] : inf;
  return t;
}

LatencySplit latencies(int k, const Allocation& alloc, const ResourceDecision& decision, const Scenario& scenario) {
  return latencies(k, offload_rate(k, alloc, decision, scenario), decision, scenario);
}

double total_power(int k, const ResourceDecision& decision, const SystemConfig& config) {
  const double f = decision.local_cpu[k];
  return decision.tx_power[k] + config.power_coeff * f * f * f;
}

double max_latency(const Allocation& alloc, const ResourceDecision& decision, const Scenario& scenario) {
  double worst = 0.0;
  for (int k = 0; k < alloc.num_vehicles(); ++k) {
    worst = std::max(worst, latencies(k, alloc, decision, scenario).total());
  }
  return worst;
}

std::vector<std::string> FeasibilityReport::violations() const {
  std::vector<std::string> out;
  auto list = [&](const Eigen::VectorXd& v, const char* what, bool flag) {
    if (flag) return;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v[i] < 0.0) out.push_back(std::string(what) + " [" + std::to_string(i) + "] margin " + std::to_string(v[i]));
    }
  };
  list(sensing_margin, "sensing SINR", sensing_ok);
  if (!allocation_binary) out.emplace_back("allocation matrix is not binary");
  if (!allocation_single) out.emplace_back("a vehicle holds more than one sub-band");
  list(mec_margin, "MEC capacity", mec_ok);
  list(local_cpu_low, "local CPU lower bound", local_cpu_ok);
  list(local_cpu_high, "local CPU upper bound", local_cpu_ok);
  list(power_margin, "power budget", power_ok);
  list(negative_power, "transmit power sign", power_ok);
  if (!beam_ok) {
    for (Eigen::Index i = 0; i < beam_norm_error.size(); ++i) {
      if (beam_norm_error[i] > 0.0) out.push_back("beamformer norm [" + std::to_string(i) + "] off by " +
                                                  std::to_string(beam_norm_error[i]));
    }
  }
  return out;
}

FeasibilityReport check_feasibility(const Allocation& alloc, const ResourceDecision& decision,
                                    const Scenario& scenario, FeasibilityTolerance tol) {
  const auto& c = scenario.config;
  const int K = alloc.num_vehicles();
  FeasibilityReport r;

  const Eigen::ArrayXXi& a = alloc.matrix().array();
  r.allocation_binary = ((a == 0) || (a == 1)).all();
  r.allocation_single = (alloc.matrix().colwise().sum().array() <= 1).all();
  r.allocation_complete = alloc.complete();

  r.sensing_margin.resize(K);
  for (int k = 0; k < K; ++k) {
    r.sensing_margin[k] = sensing_sinr(k, alloc, decision.tx_power, scenario) - c.sinr_threshold;
  }
  r.sensing_ok = (r.sensing_margin.array() >= -tol.relative * c.sinr_threshold).all();

  r.mec_margin.resize(c.num_bs);
  for (int m = 0; m < c.num_bs; ++m) {
    double used = 0.0;
    for (int k : scenario.association.served[m]) used += decision.mec_cpu[k];
    r.mec_margin[m] = c.mec_capacity - used;
  }
  r.mec_ok = (r.mec_margin.array() >= -tol.relative * c.mec_capacity).all() &&
             (decision.mec_cpu.array() >= 0.0).all();

  r.local_cpu_low = decision.local_cpu;
  r.local_cpu_high = (c.max_local_cpu - decision.local_cpu.array()).matrix();
  r.local_cpu_ok = (r.local_cpu_low.array() >= 0.0).all() &&
                   (r.local_cpu_high.array() >= -tol.relative * c.max_local_cpu).all();

  r.power_margin.resize(K);
  for (int k = 0; k < K; ++k) r.power_margin[k] = c.max_power - total_power(k, decision, c);
  r.negative_power = decision.tx_power.cwiseMin(0.0);
  r.power_ok = (r.power_margin.array() >= -tol.relative * c.max_power).all() &&
               (r.negative_power.array() == 0.0).all();

  r.beam_norm_error = (decision.beamformers.colwise().norm().array() - 1.0).abs().matrix().transpose();
  r.beam_ok = (r.beam_norm_error.array() <= tol.beam_norm).all();
  return r;
}

TrialReport evaluate(const Allocation& alloc, const ResourceDecision& decision, const Scenario& scenario) {
  const int K = alloc.num_vehicles();
  TrialReport rep;
  rep.rate = offload_rates(alloc, decision, scenario);
  rep.sensing_sinr = sensing_sinrs(alloc, decision.tx_power, scenario);
  rep.detection.resize(K);
  rep.local_latency.resize(K);
  rep.offload_latency.resize(K);
  rep.edge_latency.resize(K);
  rep.latency.resize(K);
  rep.power.resize(K);
  for (int k = 0; k < K; ++k) {
    const LatencySplit t = latencies(k, rep.rate[k], decision, scenario);
    rep.local_latency[k] = t.local;
    rep.offload_latency[k] = t.offload;
    rep.edge_latency[k] = t.edge;
    rep.latency[k] = t.total();
    rep.power[k] = total_power(k, decision, scenario.config);
    rep.detection[k] = detection_probability(rep.sensing_sinr[k], scenario.config.false_alarm);
  }
  rep.feasibility = check_feasibility(alloc, decision, scenario);
  rep.objective = K > 0 ? rep.latency.maxCoeff() : 0.0;
  return rep;
}

}  // namespace iscc
