#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iscc/allocation.hpp"
#include "iscc/scenario.hpp"

namespace iscc {

// ---------------------------------------------------------------------------
// Uplink offloading
// ---------------------------------------------------------------------------

/// D^l_k: co-channel interference covariance plus noise at vehicle k's serving
/// BS on sub-band l. Every vehicle on sub-band l contributes, whichever BS
/// serves it.
Eigen::MatrixXcd interference_plus_noise(int k, int l, const Allocation& alloc, const Eigen::VectorXd& powers,
                                         const Scenario& scenario);

/// Post-combining SINR of vehicle k on its assigned sub-band with beamformer u.
/// Zero for an unassigned vehicle.
double uplink_sinr(int k, const Allocation& alloc, const Eigen::VectorXd& powers, const Eigen::VectorXcd& u,
                   const Scenario& scenario);

/// Achievable offloading rate R_k (bit/s). Zero for an unassigned vehicle.
double offload_rate(int k, const Allocation& alloc, const ResourceDecision& decision, const Scenario& scenario);
Eigen::VectorXd offload_rates(const Allocation& alloc, const ResourceDecision& decision, const Scenario& scenario);

// ---------------------------------------------------------------------------
// Sensing
// ---------------------------------------------------------------------------

enum class SensingRange {
  MinDistance,  // alpha_k evaluated at the minimum detection distance
  Target,       // alpha_k at the vehicle's own target distance
};

/// Echo SINR (non-centrality) of vehicle k for a given echo amplitude.
double sensing_sinr(int k, const Allocation& alloc, const Eigen::VectorXd& powers, const Scenario& scenario,
                    double amplitude);
double sensing_sinr(int k, const Allocation& alloc, const Eigen::VectorXd& powers, const Scenario& scenario,
                    SensingRange range = SensingRange::MinDistance);
Eigen::VectorXd sensing_sinrs(const Allocation& alloc, const Eigen::VectorXd& powers, const Scenario& scenario,
                              SensingRange range = SensingRange::MinDistance);

/// Detection threshold psi for false-alarm probability `pfa` in (0, 1]:
/// the inverse of the central chi-square (2 dof) CDF at 1 - pfa.
double fa_threshold(double pfa);

/// First-order Marcum Q function Q_1(a, b), absolute error below 1e-10.
double marcum_q1(double a, double b);

/// Probability that the 2-dof non-central chi-square statistic with
/// non-centrality `sinr` exceeds fa_threshold(pfa).
double detection_probability(double sinr, double pfa);

// ---------------------------------------------------------------------------
// Computation latency and power
// ---------------------------------------------------------------------------

struct LatencySplit {
  double local = 0.0;    // preprocessing on the vehicle
  double offload = 0.0;  // uplink transfer of the offloaded share
  double edge = 0.0;     // MEC processing
  [[nodiscard]] double total() const { return local + offload + edge; }
};

LatencySplit latencies(int k, double rate, const ResourceDecision& decision, const Scenario& scenario);
LatencySplit latencies(int k, const Allocation& alloc, const ResourceDecision& decision, const Scenario& scenario);

/// p_k + kappa * f_L,k^3
double total_power(int k, const ResourceDecision& decision, const SystemConfig& config);

/// max_k T_k
double max_latency(const Allocation& alloc, const ResourceDecision& decision, const Scenario& scenario);

// ---------------------------------------------------------------------------
// Feasibility
// ---------------------------------------------------------------------------

struct FeasibilityReport {
  Eigen::VectorXd sensing_margin;   // gamma_k - Gamma_d (at the minimum detection distance)
  bool allocation_binary = true;
  bool allocation_single = true;    // column sums <= 1
  bool allocation_complete = true;  // every vehicle holds a sub-band
  Eigen::VectorXd mec_margin;       // F_m - sum of shares, per BS
  Eigen::VectorXd local_cpu_low;    // f_L,k
  Eigen::VectorXd local_cpu_high;   // F_l - f_L,k
  Eigen::VectorXd power_margin;     // P_max - p_k - kappa f_L,k^3
  Eigen::VectorXd negative_power;   // min(p_k, 0)
  Eigen::VectorXd beam_norm_error;  // | ||u_k|| - 1 |

  bool sensing_ok = true, mec_ok = true, local_cpu_ok = true, power_ok = true, beam_ok = true;

  [[nodiscard]] bool ok() const {
    return sensing_ok && allocation_binary && allocation_single && mec_ok && local_cpu_ok && power_ok && beam_ok;
  }
  [[nodiscard]] std::vector<std::string> violations() const;
};

struct FeasibilityTolerance {
  double relative = 1e-9;
  double beam_norm = 1e-9;
};

FeasibilityReport check_feasibility(const Allocation& alloc, const ResourceDecision& decision,
                                    const Scenario& scenario, FeasibilityTolerance tol = {});

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

struct TrialReport {
  Eigen::VectorXd rate;          // R_k (bit/s)
  Eigen::VectorXd sensing_sinr;  // gamma_k at the minimum detection distance
  Eigen::VectorXd detection;     // P_D at the minimum detection distance
  Eigen::VectorXd local_latency, offload_latency, edge_latency, latency;
  Eigen::VectorXd power;         // P_k (W)
  FeasibilityReport feasibility;
  double objective = 0.0;        // max_k T_k
  std::vector<double> trace;     // objective after each outer iteration
};

TrialReport evaluate(const Allocation& alloc, const ResourceDecision& decision, const Scenario& scenario);

}  // namespace iscc
