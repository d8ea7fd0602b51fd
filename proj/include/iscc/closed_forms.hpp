#pragma once

#include <Eigen/Dense>

#include "iscc/allocation.hpp"
#include "iscc/scenario.hpp"

namespace iscc {

/// MEC CPU share per vehicle: each server splits its capacity in proportion
/// to the offloaded workload eta * b_k * e_M, which equalizes the edge latency
/// of the vehicles it serves. Servers without vehicles are skipped.
Eigen::VectorXd mec_allocate(const Association& association, const Eigen::VectorXd& task_bits,
                             const SystemConfig& config);

struct Beamformer {
  Eigen::VectorXcd u;
  bool fallback = false;  // vehicle had no sub-band; matched filter on sub-band 0
};

/// Receive beamformer maximizing vehicle k's post-combining SINR:
/// u = D^{-1} h / ||D^{-1} h|| with the first nonzero entry real-positive.
Beamformer receive_beamformer(int k, const Allocation& alloc, const Eigen::VectorXd& powers,
                              const Scenario& scenario);

/// receive_beamformer for every vehicle, as columns.
Eigen::MatrixXcd optimal_beamformers(const Allocation& alloc, const Eigen::VectorXd& powers,
                                     const Scenario& scenario);

/// h^l_{k,m} / ||h^l_{k,m}|| on each vehicle's assigned sub-band.
Eigen::MatrixXcd matched_beamformers(const Allocation& alloc, const Scenario& scenario);

}  // namespace iscc
