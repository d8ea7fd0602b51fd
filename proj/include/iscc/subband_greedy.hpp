#pragma once

#include <Eigen/Dense>

#include "iscc/allocation.hpp"
#include "iscc/scenario.hpp"

namespace iscc {

/// I(i, j) = p_i * mean_l |g^l_{i,j}|^2: interference vehicle i causes at
/// vehicle j's radar receiver. Diagonal is zero.
Eigen::MatrixXd interference_matrix(const Eigen::VectorXd& powers, const ChannelSet& channels);

/// Sensing-centric greedy sub-band assignment. Seeds the L sub-bands with the
/// most mutually interfering vehicles, then places the remaining vehicles one
/// at a time: the vehicle whose average excess interference over its best
/// sub-band is largest goes first, into its least-interfered sub-band.
/// Ties resolve to the lowest index. Always returns a complete allocation.
Allocation greedy_allocate(const Eigen::MatrixXd& metric, int num_subbands);

}  // namespace iscc
