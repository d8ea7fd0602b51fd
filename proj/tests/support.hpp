#pragma once

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "iscc/allocation.hpp"
#include "iscc/config.hpp"
#include "iscc/scenario.hpp"

namespace iscc::test {

/// Desk-profile config resized to K vehicles, M BSs and L sub-bands.
inline SystemConfig sized(int K, int M, int L) {
  SystemConfig c = desk_profile();
  c.num_vehicles = K;
  c.num_bs = M;
  c.num_subbands = L;
  return c;
}

inline Eigen::VectorXcd random_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5) * scale);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = {g(rng), g(rng)};
  return v;
}

/// A scenario with every vehicle served by BS 0 and channels filled from
/// `rng`: uplink entries with variance `uplink_var`, cross gains with variance
/// `cross_var`. Identical bands copy sub-band 0 into every other sub-band.
inline Scenario hand_scenario(int K, int L, int N, std::mt19937_64& rng, double uplink_var = 1e-9,
                              double cross_var = 1e-14, bool identical_bands = false) {
  Scenario s;
  s.config = sized(K, 1, L);
  s.config.num_antennas = N;
  s.seed = 0;
  s.association.serving_bs.assign(K, 0);
  s.association.served.assign(1, {});
  for (int k = 0; k < K; ++k) s.association.served[0].push_back(k);
  s.topology.bs_positions = {Point(0.0, 0.0)};
  for (int k = 0; k < K; ++k) s.topology.vehicle_positions.emplace_back(10.0 * (k + 1), 0.0);
  s.topology.target_distances = Eigen::VectorXd::Constant(K, s.config.min_detect_dist);
  s.channels = ChannelSet(N, 1, K, L);
  for (int l = 0; l < L; ++l) {
    if (identical_bands && l > 0) {
      s.channels.uplink(l, 0) = s.channels.uplink(0, 0);
      s.channels.cross(l) = s.channels.cross(0);
      continue;
    }
    for (int k = 0; k < K; ++k) s.channels.uplink(l, 0).col(k) = random_vector(N, rng, std::sqrt(uplink_var));
    for (int i = 0; i < K; ++i) {
      for (int k = 0; k < K; ++k) {
        s.channels.cross(l)(i, k) = i == k ? 0.0 : random_vector(1, rng, std::sqrt(cross_var))[0];
      }
    }
  }
  s.channels.rcs = Eigen::VectorXd::Ones(K);
  const double amp = sensing_amplitude(s.config.ref_pathloss, s.config.tx_gain, s.config.rx_aperture, 1.0,
                                       s.config.min_detect_dist);
  s.channels.sensing_amp = Eigen::VectorXd::Constant(K, amp);
  s.channels.sensing_amp_min = Eigen::VectorXd::Constant(K, amp);
  s.task_bits = Eigen::VectorXd::Constant(K, s.config.task_bits());
  return s;
}

inline ResourceDecision uniform_decision(const Scenario& s, double power) {
  const int K = s.config.num_vehicles;
  ResourceDecision d;
  d.tx_power = Eigen::VectorXd::Constant(K, power);
  d.local_cpu = Eigen::VectorXd::Constant(K, s.config.max_local_cpu / 2);
  d.mec_cpu = Eigen::VectorXd::Constant(K, s.config.mec_capacity / K);
  d.beamformers = Eigen::MatrixXcd::Zero(s.config.num_antennas, K);
  for (int k = 0; k < K; ++k) d.beamformers(0, k) = 1.0;
  return d;
}

/// Every complete band vector for K vehicles and L sub-bands, in lexicographic order.
inline std::vector<std::vector<int>> all_band_vectors(int K, int L) {
  std::vector<std::vector<int>> out;
  std::vector<int> b(K, 0);
  while (true) {
    out.push_back(b);
    int i = K - 1;
    while (i >= 0 && ++b[i] == L) b[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

}  // namespace iscc::test
