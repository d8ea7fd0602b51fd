#include "iscc/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "iscc/closed_forms.hpp"
#include "iscc/metrics.hpp"
#include "iscc/power_sca.hpp"
#include "iscc/subband_bnb.hpp"
#include "iscc/subband_greedy.hpp"

namespace iscc::oracles {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Zooming grid search over a 2-D box; `f` returns +inf for infeasible points.
std::pair<Eigen::Vector2d, double> zoom_search(const std::function<double(double, double)>& f, Eigen::Vector2d lo,
                                               Eigen::Vector2d hi, int resolution, int passes) {
  Eigen::Vector2d best(lo);
  double best_value = kInf;
  for (int pass = 0; pass < passes; ++pass) {
    const Eigen::Vector2d step = (hi - lo) / (resolution - 1);
    for (int i = 0; i < resolution; ++i) {
      for (int j = 0; j < resolution; ++j) {
        const double x = lo[0] + i * step[0];
        const double y = lo[1] + j * step[1];
        const double v = f(x, y);
        if (v < best_value) {
          best_value = v;
          best = {x, y};
        }
      }
    }
    if (!std::isfinite(best_value)) break;
    const Eigen::Vector2d new_lo = (best - 2.0 * step).cwiseMax(lo);
    const Eigen::Vector2d new_hi = (best + 2.0 * step).cwiseMin(hi);
    lo = new_lo;
    hi = new_hi;
  }
  return {best, best_value};
}

std::string num(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

}  // namespace

GridOptimum single_vehicle_grid(const SystemConfig& c, double task_bits, double gain, double p_min, int resolution,
                                int passes) {
  auto latency = [&](double p, double f) {
    if (p < p_min || p <= 0.0 || f <= 0.0 || p + c.power_coeff * f * f * f > c.max_power) return kInf;
    const double rate = c.subband_bandwidth * std::log2(1.0 + p * gain / c.noise_power_bs);
    return task_bits * c.local_intensity / f + c.offload_ratio * task_bits / rate;
  };
  const auto [best, value] = zoom_search(latency, {std::max(p_min, 0.0), 1e-6 * c.max_local_cpu},
                                         {c.max_power, c.max_local_cpu}, resolution, passes);
  GridOptimum out;
  out.tx_power = Eigen::VectorXd::Constant(1, best[0]);
  out.local_cpu = Eigen::VectorXd::Constant(1, best[1]);
  out.objective = value;
  return out;
}

GridOptimum two_vehicle_power_grid(const Scenario& s, const Allocation& alloc, const Eigen::MatrixXcd& beams,
                                   const Eigen::VectorXd& local_cpu, int resolution, int passes) {
  const auto& c = s.config;
  Eigen::Matrix2d gain;  // (k, i): |u_k^H h_i|^2 at k's BS
  Eigen::Matrix2d echo = Eigen::Matrix2d::Zero();
  for (int k = 0; k < 2; ++k) {
    const auto& H = s.channels.uplink(alloc.band(k), s.association.serving_bs[k]);
    for (int i = 0; i < 2; ++i) {
      gain(k, i) = std::norm(beams.col(k).dot(H.col(i)));
      if (i != k && alloc.band(i) == alloc.band(k)) echo(k, i) = std::norm(s.channels.cross(alloc.band(k))(i, k));
    }
  }
  if (alloc.band(0) != alloc.band(1)) {
    gain(0, 1) = 0.0;
    gain(1, 0) = 0.0;
  }
  Eigen::Vector2d cap;
  for (int k = 0; k < 2; ++k) cap[k] = c.max_power - c.power_coeff * std::pow(local_cpu[k], 3);

  auto offload = [&](double p0, double p1) {
    const Eigen::Vector2d p(p0, p1);
    if ((p.array() <= 0.0).any() || (p.array() > cap.array()).any()) return kInf;
    double worst = 0.0;
    for (int k = 0; k < 2; ++k) {
      const int i = 1 - k;
      const double amp = s.channels.sensing_amp_min[k];
      const double gamma = c.accum_symbols * p[k] * amp * amp / (p[i] * echo(k, i) + c.noise_power_radar);
      if (gamma < c.sinr_threshold) return kInf;
      const double sinr = p[k] * gain(k, k) / (p[i] * gain(k, i) + c.noise_power_bs);
      worst = std::max(worst, c.offload_ratio * s.task_bits[k] / (c.subband_bandwidth * std::log2(1.0 + sinr)));
    }
    return worst;
  };
  const auto [best, value] = zoom_search(offload, {0.0, 0.0}, cap, resolution, passes);
  GridOptimum out;
  out.tx_power = best;
  out.local_cpu = local_cpu;
  out.objective = value;
  return out;
}

Eigen::VectorXd minmax_share_bisection(const Eigen::VectorXd& w, double capacity) {
  // Feasible common latency t needs sum w_k / t <= capacity.
  double lo = 0.0, hi = 1.0;
  while (w.sum() / hi > capacity) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (w.sum() / mid > capacity ? lo : hi) = mid;
  }
  return w / hi;
}

double max_rayleigh_quotient_eig(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& d) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ed(d);
  const Eigen::MatrixXcd inv_sqrt =
      ed.eigenvectors() * ed.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * ed.eigenvectors().adjoint();
  const Eigen::VectorXcd w = inv_sqrt * h;
  Eigen::MatrixXcd m = w * w.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(m, Eigen::EigenvaluesOnly);
  return em.eigenvalues().maxCoeff();
}

Eigen::VectorXcd random_complex(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = {g(rng), g(rng)};
  return v;
}

double max_rayleigh_quotient_random(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& d, int draws,
                                    std::mt19937_64& rng) {
  double best = 0.0;
  for (int t = 0; t < draws; ++t) {
    Eigen::VectorXcd u = random_complex(static_cast<int>(h.size()), rng);
    u.normalize();
    best = std::max(best, std::norm(u.dot(h)) / (u.adjoint() * d * u).value().real());
  }
  return best;
}

Eigen::MatrixXcd random_covariance(int n, int rank, double noise, std::mt19937_64& rng) {
  Eigen::MatrixXcd d = noise * Eigen::MatrixXcd::Identity(n, n);
  std::uniform_real_distribution<double> power(0.1, 2.0);
  for (int r = 0; r < rank; ++r) {
    const Eigen::VectorXcd v = random_complex(n, rng);
    d += power(rng) * v * v.adjoint();
  }
  return d;
}

double simulate_detection(double sinr, double pfa, int draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const double threshold = -2.0 * std::log(pfa);
  const double mean = std::sqrt(sinr);
  int hits = 0;
  for (int t = 0; t < draws; ++t) {
    const double re = mean + g(rng);
    const double im = g(rng);
    hits += re * re + im * im > threshold;
  }
  return static_cast<double>(hits) / draws;
}

double echo_amplitude(double ref_pathloss, double tx_gain, double rx_aperture, double rcs, double distance) {
  return std::sqrt(ref_pathloss * tx_gain * rcs * rx_aperture) / (4.0 * std::numbers::pi * distance * distance);
}

std::vector<OracleOutcome> run_oracle_suites(const SystemConfig& config, std::uint64_t seed) {
  std::vector<OracleOutcome> out;
  std::mt19937_64 rng(seed);

  {  // Beam-limited search against exhaustive enumeration.
    SystemConfig c = config;
    c.num_vehicles = 5;
    c.num_bs = 1;
    c.num_subbands = 3;
    c.beam_width = 243;
    int matched = 0, total = 5;
    for (int t = 0; t < total; ++t) {
      const Scenario s = make_scenario(c, seed + t);
      ResourceDecision d;
      d.tx_power = Eigen::VectorXd::Constant(c.num_vehicles, 0.5 * c.max_power);
      const Allocation warm = greedy_allocate(interference_matrix(d.tx_power, s.channels), c.num_subbands);
      d.beamformers = matched_beamformers(warm, s);
      const BnbResult r = bnb_allocate(d, s, warm, {c.beam_width, BeamPolicy::Optimal, true});
      const Allocation brute = brute_force_allocate(d, s, BeamPolicy::Optimal, true);
      if (!brute.complete()) {
        matched += r.from_warm_start;
      } else {
        matched += !r.from_warm_start && r.objective == node_bound(brute, d, s, BeamPolicy::Optimal);
      }
    }
    out.push_back({"bnb-vs-exhaustive", matched == total, std::to_string(matched) + "/" + std::to_string(total)});
  }

  {  // Proportional MEC split against min-max bisection.
    double worst = 0.0;
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int t = 0; t < 20; ++t) {
      const int n = 2 + t % 5;
      Association a;
      a.serving_bs.assign(n, 0);
      a.served = {std::vector<int>(n)};
      Eigen::VectorXd bits(n);
      for (int k = 0; k < n; ++k) {
        a.served[0][k] = k;
        bits[k] = u(rng) * config.task_bits();
      }
      const Eigen::VectorXd share = mec_allocate(a, bits, config);
      const Eigen::VectorXd ref =
          minmax_share_bisection(bits * config.offload_ratio * config.mec_intensity, config.mec_capacity);
      worst = std::max(worst, ((share - ref).cwiseAbs().array() / ref.array()).maxCoeff());
    }
    out.push_back({"mec-vs-bisection", worst <= 1e-6, "max relative error " + num(worst)});
  }

  {  // Receive beamformer against eigen-decomposition and random search.
    double worst = 0.0;
    bool dominated = true;
    SystemConfig c = config;
    c.num_vehicles = 4;
    c.num_bs = 1;
    c.num_subbands = 1;
    for (int t = 0; t < 10; ++t) {
      const Scenario s = make_scenario(c, seed + 100 + t);
      const Allocation a = Allocation::from_bands(std::vector<int>(4, 0), 1);
      const Eigen::VectorXd p = Eigen::VectorXd::Constant(4, 0.5 * c.max_power);
      const Eigen::VectorXcd u = receive_beamformer(0, a, p, s).u;
      const Eigen::MatrixXcd d = interference_plus_noise(0, 0, a, p, s);
      const Eigen::VectorXcd h = s.channels.uplink(0, 0).col(0);
      const double q = std::norm(u.dot(h)) / (u.adjoint() * d * u).value().real();
      const double q_eig = max_rayleigh_quotient_eig(h, d);
      worst = std::max(worst, std::abs(q - q_eig) / q_eig);
      dominated = dominated && q >= max_rayleigh_quotient_random(h, d, 1000, rng);
    }
    out.push_back({"beamformer-vs-eigen", worst <= 1e-8 && dominated, "max relative gap " + num(worst)});
  }

  {  // Single-vehicle power and CPU against a 2-D grid.
    SystemConfig c = config;
    c.num_vehicles = 1;
    c.num_bs = 1;
    c.num_subbands = 1;
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
      const Scenario s = make_scenario(c, seed + 200 + t);
      const Allocation a = Allocation::from_bands(std::vector<int>{0}, 1);
      const Eigen::MatrixXcd u = matched_beamformers(a, s);
      ScaOptions opt;
      opt.tolerance = c.sca_tol;
      const ScaSolution sol = sca_optimize(a, u, s, opt);
      const double gain = std::norm(u.col(0).dot(s.channels.uplink(0, 0).col(0)));
      const double amp = s.channels.sensing_amp_min[0];
      const double p_min = c.sinr_threshold * c.noise_power_radar / (c.accum_symbols * amp * amp);
      const GridOptimum g = single_vehicle_grid(c, s.task_bits[0], gain, p_min);
      worst = std::max(worst, (sol.objective() - g.objective) / g.objective);
    }
    out.push_back({"sca-vs-grid", worst <= 0.01, "max relative excess " + num(worst)});
  }

  {  // Detection probability against Monte Carlo.
    const double pd = detection_probability(100.0, 1e-4);
    const double mc = simulate_detection(100.0, 1e-4, 100000, seed + 300);
    out.push_back({"detection-vs-montecarlo", std::abs(pd - mc) <= 0.01,
                   "closed form " + num(pd) + ", simulated " + num(mc)});
  }

  {  // Echo amplitude against the radar range equation.
    const Scenario s = make_scenario(config, seed + 400);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < s.channels.rcs.size(); ++k) {
      const double ref = echo_amplitude(config.ref_pathloss, config.tx_gain, config.rx_aperture, s.channels.rcs[k],
                                        config.min_detect_dist);
      worst = std::max(worst, std::abs(s.channels.sensing_amp_min[k] - ref) / ref);
    }
    out.push_back({"echo-amplitude", worst <= 1e-12, "max relative error " + num(worst)});
  }
  return out;
}

}  // namespace iscc::oracles
