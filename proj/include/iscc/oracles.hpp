#pragma once

// Reference computations that share no code path with the optimizers they
// check: grids, bisection, full eigen-decompositions and Monte Carlo.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iscc/allocation.hpp"
#include "iscc/scenario.hpp"

namespace iscc::oracles {

struct GridOptimum {
  Eigen::VectorXd tx_power;
  Eigen::VectorXd local_cpu;
  double objective = 0.0;  // local + offload latency bound (s)
};

/// Single vehicle on its own sub-band with receive gain |u^H h|^2 = `gain`:
/// minimizes b e_L / f + eta b / (B log2(1 + p gain / sigma^2)) over the 2-D
/// (p, f) grid subject to p + kappa f^3 <= P_max, p >= p_min, f <= F_l, by
/// repeated zooming around the best cell.
GridOptimum single_vehicle_grid(const SystemConfig& config, double task_bits, double gain, double p_min,
                                int resolution = 101, int passes = 8);

/// Two co-channel vehicles with local CPUs fixed: minimizes
/// max_k eta b_k / (B r_k(p)) over a zooming 2-D power grid subject to the
/// budget and echo-SINR rows. Returns the offload term only in `objective`.
GridOptimum two_vehicle_power_grid(const Scenario& scenario, const Allocation& alloc,
                                   const Eigen::MatrixXcd& beamformers, const Eigen::VectorXd& local_cpu,
                                   int resolution = 101, int passes = 8);

/// min max_k w_k / f_k  s.t.  sum f_k <= capacity, by bisection on the common
/// latency value.
Eigen::VectorXd minmax_share_bisection(const Eigen::VectorXd& workloads, double capacity);

/// Largest value of (u^H h h^H u) / (u^H D u) from a full eigen-decomposition
/// of D^{-1/2} h h^H D^{-1/2}.
double max_rayleigh_quotient_eig(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& d);

/// Largest quotient over `draws` random unit vectors.
double max_rayleigh_quotient_random(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& d, int draws,
                                    std::mt19937_64& rng);

/// Fraction of draws in which |sqrt(gamma) + n|^2 (n ~ CN(0, 2), i.e. two unit
/// real Gaussians) exceeds -2 ln(pfa).
double simulate_detection(double sinr, double pfa, int draws, std::uint64_t seed);

/// Echo amplitude from the radar range equation: sqrt(rho0 Gt xi Ar) / (4 pi d^2).
double echo_amplitude(double ref_pathloss, double tx_gain, double rx_aperture, double rcs, double distance);

/// Random Hermitian positive definite N x N matrix: sigma^2 I + sum of rank-one terms.
Eigen::MatrixXcd random_covariance(int n, int rank, double noise, std::mt19937_64& rng);
Eigen::VectorXcd random_complex(int n, std::mt19937_64& rng);

struct OracleOutcome {
  std::string suite;
  bool pass = false;
  std::string detail;
};

/// The brute-force, closed-form, grid and Monte Carlo checks on instances
/// drawn from `seed`.
std::vector<OracleOutcome> run_oracle_suites(const SystemConfig& config, std::uint64_t seed);

}  // namespace iscc::oracles
