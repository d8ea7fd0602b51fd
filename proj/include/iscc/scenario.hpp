#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "iscc/config.hpp"

namespace iscc {

using Point = Eigen::Vector2d;

struct Topology {
  std::vector<Point> bs_positions;
  std::vector<Point> vehicle_positions;
  Eigen::VectorXd target_distances;  // d_t,k in m
};

struct Association {
  std::vector<int> serving_bs;           // m(k)
  std::vector<std::vector<int>> served;  // vehicles of each BS, ascending
};

/// Small-scale and large-scale channel state for one network instance.
class ChannelSet {
 public:
  ChannelSet() = default;
  ChannelSet(int antennas, int num_bs, int vehicles, int subbands);

  [[nodiscard]] int num_antennas() const { return antennas_; }
  [[nodiscard]] int num_bs() const { return num_bs_; }
  [[nodiscard]] int num_vehicles() const { return vehicles_; }
  [[nodiscard]] int num_subbands() const { return subbands_; }

  /// N x K matrix whose column i is h^l_{i,m}.
  [[nodiscard]] const Eigen::MatrixXcd& uplink(int l, int m) const { return uplink_[index(l, m)]; }
  Eigen::MatrixXcd& uplink(int l, int m) { return uplink_[index(l, m)]; }

  /// K x K matrix with entry (i, k) = g^l_{i,k}, the channel from vehicle i to vehicle k.
  [[nodiscard]] const Eigen::MatrixXcd& cross(int l) const { return cross_[l]; }
  Eigen::MatrixXcd& cross(int l) { return cross_[l]; }

  Eigen::VectorXd rcs;              // xi_k (m^2)
  Eigen::VectorXd sensing_amp;      // alpha_k at the vehicle's own target distance
  Eigen::VectorXd sensing_amp_min;  // alpha_k evaluated at the minimum detection distance

 private:
  [[nodiscard]] std::size_t index(int l, int m) const {
    return static_cast<std::size_t>(l) * num_bs_ + m;
  }
  int antennas_ = 0, num_bs_ = 0, vehicles_ = 0, subbands_ = 0;
  std::vector<Eigen::MatrixXcd> uplink_;
  std::vector<Eigen::MatrixXcd> cross_;
};

/// A complete, immutable network instance.
struct Scenario {
  SystemConfig config;
  std::uint64_t seed = 0;
  Topology topology;
  Association association;
  ChannelSet channels;
  Eigen::VectorXd task_bits;  // b_k
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Radar echo amplitude for a point target at distance `distance`.
double sensing_amplitude(double ref_pathloss, double tx_gain, double rx_aperture, double rcs,
                         double distance);

/// Seeds an independent stream from a base seed and a stream label.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

Topology generate_topology(const SystemConfig& config, std::uint64_t seed);
Association associate(const Topology& topology, const SystemConfig& config);
ChannelSet sample_channels(const SystemConfig& config, const Topology& topology,
                           const Association& association, std::uint64_t seed);
Eigen::VectorXd task_volumes(const SystemConfig& config);

/// Topology, association, channels and tasks from one seed.
Scenario make_scenario(const SystemConfig& config, std::uint64_t seed);

/// The channel estimate a scheme optimizes on: every uplink and V2V coefficient
/// scaled by (1 + e), e ~ CN(0, config.csi_error), from the scenario's own seed.
/// Returns an unchanged copy when csi_error is 0.
Scenario estimated_scenario(const Scenario& scenario);

/// Region bounds of the lane grid (m).
inline constexpr double kRegionMin = -200.0;
inline constexpr double kRegionMax = 600.0;

}  // namespace iscc
