#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "iscc/allocation.hpp"
#include "iscc/metrics.hpp"
#include "iscc/scenario.hpp"

namespace iscc {

enum class Scheme { Joint, Ccra, Scra, Rsba, Fpcr, Mrc };

inline constexpr std::array<Scheme, 6> kAllSchemes = {Scheme::Joint, Scheme::Ccra, Scheme::Scra,
                                                      Scheme::Rsba,  Scheme::Fpcr, Scheme::Mrc};

std::string_view scheme_name(Scheme scheme);
/// Case-insensitive tag lookup ("joint", "CCRA", ...).
std::optional<Scheme> parse_scheme(std::string_view tag);

struct RunResult {
  Scheme scheme = Scheme::Joint;
  Allocation allocation;
  ResourceDecision decision;
  TrialReport report;  // evaluated against the instance's own threshold

  double initial_objective = 0.0;
  std::vector<double> trace;  // max_k T_k after each outer iteration
  bool converged = false;

  // The instance's echo-SINR threshold was unreachable; the loop ran with the
  // largest reachable common threshold (scaled by 0.95) instead.
  bool threshold_relaxed = false;
  double enforced_threshold = 0.0;

  std::vector<std::size_t> bnb_evaluations;  // per outer iteration
  std::size_t bnb_evaluation_limit = 0;      // K * L * S_len
  int sca_iterations = 0;
};

/// Alternating optimization: sub-band allocation, power and local CPU,
/// MEC shares, receive beamforming; each block update is kept only when it
/// does not worsen max_k T_k.
RunResult run_joint(const Scenario& scenario);

/// The joint scheme or one of the baselines. With a nonzero csi_error the
/// scheme sees estimated_scenario() and `report` is scored on the true channels.
RunResult run_scheme(Scheme scheme, const Scenario& scenario);

/// Computing-centric sequential allocation: vehicles by descending workload,
/// each to the sub-band maximizing the current minimum weighted rate. No
/// sensing constraint.
Allocation ccra_allocate(const ResourceDecision& decision, const Scenario& scenario);

/// Uniform random sub-band per vehicle, seeded from the instance seed.
Allocation random_allocate(const Scenario& scenario);

}  // namespace iscc
