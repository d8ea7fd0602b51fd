#pragma once

#include <cstddef>
#include <vector>

#include "iscc/allocation.hpp"
#include "iscc/scenario.hpp"

namespace iscc {

/// Receive combiner assumed while scoring candidate sub-band assignments.
enum class BeamPolicy {
  Fixed,    // decision.beamformers as given
  Matched,  // h^l / ||h^l|| on the candidate sub-band
  Optimal,  // D^-1 h for the candidate (partial) assignment
};

/// Tree level order: level d assigns vehicle order[d].
enum class VehicleOrder { Natural, DescendingInterference };

struct BnbOptions {
  int beam_width = 16;  // S_len
  BeamPolicy beams = BeamPolicy::Optimal;
  bool sensing_constraint = true;
  VehicleOrder order = VehicleOrder::Natural;
};

/// A node of the L-ary assignment tree: the vehicles of the first `depth`
/// levels hold a sub-band, all others are unassigned.
struct SearchNode {
  Allocation partial;
  int depth = 0;
  double bound = 0.0;
};

struct BnbResult {
  Allocation allocation;
  double objective = 0.0;
  bool sensing_infeasible = false;  // nothing survived; warm start returned
  bool from_warm_start = false;
  std::size_t node_evaluations = 0;
};

/// w_k B log2(1 + SINR_k) with SINR_k computed against the vehicles assigned in
/// `partial` only; w_k = 1 / (eta b_k).
double weighted_rate(int k, const Allocation& partial, const ResourceDecision& decision, const Scenario& scenario,
                     BeamPolicy beams);

/// Minimum weighted rate over the assigned vehicles of `partial`.
double node_bound(const Allocation& partial, const ResourceDecision& decision, const Scenario& scenario,
                  BeamPolicy beams);

/// Every assigned vehicle meets the echo-SINR threshold at the minimum
/// detection distance, counting interference from assigned vehicles only.
bool partial_sensing_feasible(const Allocation& partial, const Eigen::VectorXd& powers, const Scenario& scenario);

/// Minimum echo SINR (at the minimum detection distance) over assigned vehicles.
double min_sensing_sinr(const Allocation& partial, const Eigen::VectorXd& powers, const Scenario& scenario);

/// Beam-limited breadth-first branch and bound maximizing the minimum weighted
/// offloading rate. Nodes below the warm start's objective, or violating the
/// sensing threshold, are pruned; at most `beam_width` nodes survive a level.
BnbResult bnb_allocate(const ResourceDecision& decision, const Scenario& scenario, const Allocation& warm_start,
                       const BnbOptions& options);

/// Same search, maximizing the minimum echo SINR instead.
BnbResult bnb_allocate_sensing(const ResourceDecision& decision, const Scenario& scenario,
                               const Allocation& warm_start, const BnbOptions& options);

/// Exhaustive search over all L^K complete allocations (L^K <= 1e6) for the
/// maximum minimum weighted rate among sensing-feasible ones; ties go to the
/// lexicographically smallest band vector. Throws std::length_error when the
/// instance is too large. Returns an empty (all-unassigned) allocation when
/// nothing is feasible.
Allocation brute_force_allocate(const ResourceDecision& decision, const Scenario& scenario, BeamPolicy beams,
                                bool sensing_constraint = true);

std::vector<int> vehicle_order(const ResourceDecision& decision, const Scenario& scenario, VehicleOrder order);

}  // namespace iscc
