#include "iscc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace iscc {
namespace {

// Stream labels for derive_seed.
constexpr std::uint64_t kTopologyStream = 0x746f706fULL;
constexpr std::uint64_t kUplinkStream = 0x75706c6bULL;
constexpr std::uint64_t kCrossStream = 0x63726f73ULL;
constexpr std::uint64_t kRcsStream = 0x72637321ULL;
constexpr std::uint64_t kCsiStream = 0x63736965ULL;

std::complex<double> unit_cn(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

}  // namespace

ChannelSet::ChannelSet(int antennas, int num_bs, int vehicles, int subbands)
    : antennas_(antennas), num_bs_(num_bs), vehicles_(vehicles), subbands_(subbands) {
  uplink_.assign(static_cast<std::size_t>(subbands) * num_bs, Eigen::MatrixXcd::Zero(antennas, vehicles));
  cross_.assign(subbands, Eigen::MatrixXcd::Zero(vehicles, vehicles));
  rcs = Eigen::VectorXd::Zero(vehicles);
  sensing_amp = Eigen::VectorXd::Zero(vehicles);
  sensing_amp_min = Eigen::VectorXd::Zero(vehicles);
}

double sensing_amplitude(double ref_pathloss, double tx_gain, double rx_aperture, double rcs,
                         double distance) {
  const double spread = 4.0 * std::numbers::pi * distance * distance;
  return std::sqrt(ref_pathloss * tx_gain / spread * (rcs * rx_aperture / spread));
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finalizer over the combined words.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Topology generate_topology(const SystemConfig& config, std::uint64_t seed) {
  static const Point corners[] = {{0.0, 0.0}, {0.0, 400.0}, {400.0, 400.0}, {400.0, 0.0}};

  Topology topo;
  for (int m = 0; m < config.num_bs; ++m) topo.bs_positions.push_back(corners[m % 4]);

  // Four horizontal and four vertical lanes, centred in equal strips of the region.
  constexpr int kLanesPerAxis = 4;
  const double span = kRegionMax - kRegionMin;
  std::mt19937_64 rng(derive_seed(seed, kTopologyStream));
  std::uniform_int_distribution<int> lane_pick(0, 2 * kLanesPerAxis - 1);
  std::uniform_real_distribution<double> along(kRegionMin, kRegionMax);
  for (int k = 0; k < config.num_vehicles; ++k) {
    const int lane = lane_pick(rng);
    const double offset = kRegionMin + span * ((lane % kLanesPerAxis) + 0.5) / kLanesPerAxis;
    const double pos = along(rng);
    topo.vehicle_positions.push_back(lane < kLanesPerAxis ? Point(pos, offset) : Point(offset, pos));
  }

  topo.target_distances.resize(config.num_vehicles);
  std::uniform_real_distribution<double> target(0.5 * config.min_detect_dist, 2.0 * config.min_detect_dist);
  for (int k = 0; k < config.num_vehicles; ++k) {
    const double d = target(rng);
    topo.target_distances[k] = config.target_distance > 0.0 ? config.target_distance : d;
  }
  return topo;
}

Association associate(const Topology& topology, const SystemConfig& config) {
  const int num_vehicles = static_cast<int>(topology.vehicle_positions.size());
  const int num_bs = static_cast<int>(topology.bs_positions.size());

  std::vector<std::vector<int>> by_distance(num_vehicles);
  std::vector<double> gap(num_vehicles, 0.0);
  for (int k = 0; k < num_vehicles; ++k) {
    std::vector<double> dist(num_bs);
    for (int m = 0; m < num_bs; ++m) dist[m] = (topology.vehicle_positions[k] - topology.bs_positions[m]).norm();
    auto& order = by_distance[k];
    order.resize(num_bs);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist[a] < dist[b]; });
    gap[k] = num_bs > 1 ? dist[order[1]] - dist[order[0]] : 0.0;
  }

  // Vehicles that would lose the most by moving to their second choice go first.
  std::vector<int> order(num_vehicles);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return gap[a] > gap[b]; });

  const int floor_quota = num_vehicles / num_bs;
  const int extra = num_vehicles % num_bs;
  std::vector<int> count(num_bs, 0);
  int at_ceiling = 0;

  Association assoc;
  assoc.serving_bs.assign(num_vehicles, -1);
  assoc.served.assign(num_bs, {});
  for (int k : order) {
    for (int m : by_distance[k]) {
      const bool below_floor = count[m] < floor_quota;
      const bool may_exceed = count[m] == floor_quota && at_ceiling < extra;
      if (!below_floor && !may_exceed) continue;
      if (!below_floor) ++at_ceiling;
      ++count[m];
      assoc.serving_bs[k] = m;
      break;
    }
  }
  for (int k = 0; k < num_vehicles; ++k) assoc.served[assoc.serving_bs[k]].push_back(k);
  (void)config;
  return assoc;
}

ChannelSet sample_channels(const SystemConfig& config, const Topology& topology,
                           const Association& association, std::uint64_t seed) {
  (void)association;
  const int K = config.num_vehicles;
  const int M = config.num_bs;
  const int L = config.num_subbands;
  const int N = config.num_antennas;
  ChannelSet ch(N, M, K, L);

  std::mt19937_64 up_rng(derive_seed(seed, kUplinkStream));
  for (int l = 0; l < L; ++l) {
    for (int m = 0; m < M; ++m) {
      auto& H = ch.uplink(l, m);
      for (int i = 0; i < K; ++i) {
        const double d = (topology.vehicle_positions[i] - topology.bs_positions[m]).norm();
        if (!(d > 0.0)) throw GeometryError("vehicle " + std::to_string(i) + " coincides with BS " + std::to_string(m));
        const double gain = std::sqrt(config.ref_pathloss / (d * d));
        for (int n = 0; n < N; ++n) H(n, i) = gain * unit_cn(up_rng);
      }
    }
  }

  std::mt19937_64 cross_rng(derive_seed(seed, kCrossStream));
  for (int l = 0; l < L; ++l) {
    auto& G = ch.cross(l);
    for (int i = 0; i < K; ++i) {
      for (int k = 0; k < K; ++k) {
        if (i == k) continue;
        const double d = (topology.vehicle_positions[i] - topology.vehicle_positions[k]).norm();
        if (!(d > 0.0)) throw GeometryError("vehicles " + std::to_string(i) + " and " + std::to_string(k) + " coincide");
        const double gain = std::sqrt(config.ref_pathloss * std::pow(d, -config.v2v_pathloss_exponent));
        G(i, k) = gain * unit_cn(cross_rng);
      }
    }
  }

  std::mt19937_64 rcs_rng(derive_seed(seed, kRcsStream));
  std::uniform_real_distribution<double> rcs(config.rcs_lo, config.rcs_hi);
  for (int k = 0; k < K; ++k) {
    ch.rcs[k] = config.rcs_hi > config.rcs_lo ? rcs(rcs_rng) : config.rcs_lo;
    ch.sensing_amp[k] = sensing_amplitude(config.ref_pathloss, config.tx_gain, config.rx_aperture, ch.rcs[k],
                                          topology.target_distances[k]);
    ch.sensing_amp_min[k] = sensing_amplitude(config.ref_pathloss, config.tx_gain, config.rx_aperture, ch.rcs[k],
                                              config.min_detect_dist);
  }
  return ch;
}

Eigen::VectorXd task_volumes(const SystemConfig& config) {
  return Eigen::VectorXd::Constant(config.num_vehicles, config.task_bits());
}

Scenario make_scenario(const SystemConfig& config, std::uint64_t seed) {
  Scenario s;
  s.config = config;
  s.seed = seed;
  s.topology = generate_topology(config, seed);
  s.association = associate(s.topology, config);
  s.channels = sample_channels(config, s.topology, s.association, seed);
  s.task_bits = task_volumes(config);
  return s;
}

Scenario estimated_scenario(const Scenario& scenario) {
  Scenario est = scenario;
  const double eps = std::sqrt(scenario.config.csi_error);
  if (eps == 0.0) return est;
  std::mt19937_64 rng(derive_seed(scenario.seed, kCsiStream));
  auto& ch = est.channels;
  for (int l = 0; l < ch.num_subbands(); ++l) {
    for (int m = 0; m < ch.num_bs(); ++m) {
      for (auto& h : ch.uplink(l, m).reshaped()) h *= 1.0 + eps * unit_cn(rng);
    }
    auto& G = ch.cross(l);
    for (int i = 0; i < G.rows(); ++i) {
      for (int k = 0; k < G.cols(); ++k) {
        if (i != k) G(i, k) *= 1.0 + eps * unit_cn(rng);
      }
    }
  }
  return est;
}

}  // namespace iscc
