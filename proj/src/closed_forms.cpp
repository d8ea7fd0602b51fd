#include "iscc/closed_forms.hpp"

#include <cmath>

#include "iscc/linalg.hpp"
#include "iscc/metrics.hpp"

namespace iscc {

Eigen::VectorXd mec_allocate(const Association& association, const Eigen::VectorXd& task_bits,
                             const SystemConfig& config) {
  Eigen::VectorXd share = Eigen::VectorXd::Zero(task_bits.size());
  for (const auto& members : association.served) {
    if (members.empty()) continue;
    double total = 0.0;
    for (int k : members) total += config.offload_ratio * task_bits[k] * config.mec_intensity;
    for (int k : members) {
      share[k] = config.offload_ratio * task_bits[k] * config.mec_intensity / total * config.mec_capacity;
    }
    // The last share absorbs the rounding residual so the in-order sum lands
    // on the capacity bit-for-bit; single-ulp steps settle a rounding tie.
    const int last = members.back();
    double prefix = 0.0;
    for (std::size_t i = 0; i + 1 < members.size(); ++i) prefix += share[members[i]];
    share[last] = config.mec_capacity - prefix;
    for (int step = 0; step < 64 && prefix + share[last] != config.mec_capacity; ++step) {
      share[last] = std::nextafter(share[last], prefix + share[last] > config.mec_capacity ? 0.0 : config.mec_capacity);
    }
  }
  return share;
}

Beamformer receive_beamformer(int k, const Allocation& alloc, const Eigen::VectorXd& powers,
                              const Scenario& scenario) {
  const int m = scenario.association.serving_bs[k];
  const int l = alloc.band(k);
  if (l < 0) return {matched_filter(scenario.channels.uplink(0, m).col(k)), true};

  const Eigen::MatrixXcd d = interference_plus_noise(k, l, alloc, powers, scenario);
  Eigen::VectorXcd u = d.llt().solve(scenario.channels.uplink(l, m).col(k));
  canonicalize_beam(u);
  return {std::move(u), false};
}

Eigen::MatrixXcd optimal_beamformers(const Allocation& alloc, const Eigen::VectorXd& powers,
                                     const Scenario& scenario) {
  Eigen::MatrixXcd u(scenario.channels.num_antennas(), alloc.num_vehicles());
  for (int k = 0; k < alloc.num_vehicles(); ++k) u.col(k) = receive_beamformer(k, alloc, powers, scenario).u;
  return u;
}

Eigen::MatrixXcd matched_beamformers(const Allocation& alloc, const Scenario& scenario) {
  Eigen::MatrixXcd u(scenario.channels.num_antennas(), alloc.num_vehicles());
  for (int k = 0; k < alloc.num_vehicles(); ++k) {
    const int l = std::max(alloc.band(k), 0);
    u.col(k) = matched_filter(scenario.channels.uplink(l, scenario.association.serving_bs[k]).col(k));
  }
  return u;
}

}  // namespace iscc
