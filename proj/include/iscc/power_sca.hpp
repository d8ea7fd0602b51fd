#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "iscc/allocation.hpp"
#include "iscc/scenario.hpp"

namespace iscc {

/// No transmit powers satisfy every echo-SINR threshold within the power budget.
class SensingInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Expansion points of the two exponential lower bounds, per vehicle:
/// v2 ~ log of interference-plus-noise, v3 ~ log of the uplink SINR.
struct ScaAnchors {
  Eigen::VectorXd v2, v3;
};

struct ScaSolution {
  Eigen::VectorXd tx_power;   // p_k (W)
  Eigen::VectorXd local_cpu;  // f_L,k (cycles/s)
  Eigen::VectorXd rate;       // r_k, spectral efficiency (bit/s/Hz)
  double mu1 = 0.0;           // max local latency bound (s)
  double mu2 = 0.0;           // max offload latency bound (s)
  Eigen::VectorXd c1, c2, v1, v2, v3;

  bool stalled = false;             // a subproblem had no strictly feasible point
  int iterations = 0;
  std::vector<double> trace;        // mu1 + mu2 after each accepted iterate
  Eigen::VectorXd interior;         // last barrier iterate (normalized); warm-start state

  [[nodiscard]] double objective() const { return mu1 + mu2; }
};

struct ScaOptions {
  bool sensing_constraint = true;
  int max_iterations = 50;
  double tolerance = 1e-5;  // relative change of mu1 + mu2
};

/// Smallest transmit powers meeting echo-SINR `threshold` for every vehicle of
/// `alloc` (alpha at the minimum detection distance), ignoring the budget.
/// nullopt when the co-channel coupling makes the threshold unreachable.
std::optional<Eigen::VectorXd> min_sensing_powers(const Allocation& alloc, const Scenario& scenario,
                                                  double threshold);

/// Largest common echo-SINR threshold reachable with every power below
/// `power_cap` (the full budget when not given).
double max_common_threshold(const Allocation& alloc, const Scenario& scenario,
                            std::optional<double> power_cap = std::nullopt);

/// Powers maximizing the minimum echo SINR with every power at most
/// `power_cap`; the largest entry sits on the cap.
Eigen::VectorXd max_min_sensing_powers(const Allocation& alloc, const Scenario& scenario, double power_cap);

/// Strictly feasible starting point for a complete allocation and fixed
/// beamformers. Throws SensingInfeasible when the echo-SINR rows admit no
/// power vector inside the budget.
ScaSolution init_feasible(const Allocation& alloc, const Eigen::MatrixXcd& beamformers, const Scenario& scenario,
                          bool sensing_constraint = true);

/// Anchors tight at the solution's powers: v2 = ln I_k(p), v3 = ln SINR_k(p).
ScaAnchors anchors_at(const Eigen::VectorXd& tx_power, const Allocation& alloc, const Eigen::MatrixXcd& beamformers,
                      const Scenario& scenario);

/// One convex subproblem around `anchors`, started from `start`. On failure
/// returns `start` with `stalled` set.
ScaSolution solve_subproblem(const ScaAnchors& anchors, const ScaSolution& start, const Allocation& alloc,
                             const Eigen::MatrixXcd& beamformers, const Scenario& scenario,
                             const ScaOptions& options = {});

/// Successive convex approximation from init_feasible (or from `start`'s powers
/// and frequencies when given). Only non-increasing iterates are accepted.
ScaSolution sca_optimize(const Allocation& alloc, const Eigen::MatrixXcd& beamformers, const Scenario& scenario,
                         const ScaOptions& options = {}, const ResourceDecision* start = nullptr);

}  // namespace iscc
