#include "iscc/subband_bnb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "iscc/linalg.hpp"
#include "iscc/metrics.hpp"
#include "iscc/subband_greedy.hpp"

namespace iscc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using Score = std::function<double(const Allocation&)>;

BnbResult beam_search(const ResourceDecision& decision, const Scenario& scenario, const Allocation& warm_start,
                      const BnbOptions& options, const Score& score) {
  const int K = scenario.config.num_vehicles;
  const int L = scenario.config.num_subbands;
  const auto& powers = decision.tx_power;

  const bool warm_feasible = !options.sensing_constraint || partial_sensing_feasible(warm_start, powers, scenario);
  const double warm_objective = score(warm_start);
  // An infeasible warm start cannot serve as a bound: every feasible leaf
  // might score below it.
  const double lower_bound = warm_feasible ? warm_objective : kNegInf;

  BnbResult result;
  const std::vector<int> order = vehicle_order(decision, scenario, options.order);

  std::vector<SearchNode> frontier;
  frontier.push_back({Allocation(L, K), 0, 0.0});
  std::vector<SearchNode> children;
  for (int depth = 0; depth < K && !frontier.empty(); ++depth) {
    const int vehicle = order[depth];
    children.clear();
    for (const SearchNode& node : frontier) {
      for (int l = 0; l < L; ++l) {
        SearchNode child{node.partial, depth + 1, 0.0};
        child.partial.assign(vehicle, l);
        ++result.node_evaluations;
        if (options.sensing_constraint && !partial_sensing_feasible(child.partial, powers, scenario)) continue;
        child.bound = score(child.partial);
        if (child.bound < lower_bound) continue;
        children.push_back(std::move(child));
      }
    }
    // Stable: equal bounds keep generation order (parent rank, then band).
    std::stable_sort(children.begin(), children.end(),
                     [](const SearchNode& a, const SearchNode& b) { return a.bound > b.bound; });
    if (static_cast<int>(children.size()) > options.beam_width) children.resize(options.beam_width);
    std::swap(frontier, children);
  }

  if (frontier.empty()) {
    result.allocation = warm_start;
    result.objective = warm_objective;
    result.sensing_infeasible = !warm_feasible;
    result.from_warm_start = true;
    return result;
  }
  result.allocation = frontier.front().partial;
  result.objective = frontier.front().bound;
  return result;
}

}  // namespace

double weighted_rate(int k, const Allocation& partial, const ResourceDecision& decision, const Scenario& scenario,
                     BeamPolicy beams) {
  const int l = partial.band(k);
  if (l < 0) return 0.0;
  const auto& c = scenario.config;
  const int m = scenario.association.serving_bs[k];
  const auto h = scenario.channels.uplink(l, m).col(k);
  const Eigen::MatrixXcd d = interference_plus_noise(k, l, partial, decision.tx_power, scenario);

  double gain = 0.0;
  switch (beams) {
    case BeamPolicy::Fixed:
      gain = rayleigh_quotient(decision.beamformers.col(k), h, d);
      break;
    case BeamPolicy::Matched:
      gain = rayleigh_quotient(h, h, d);
      break;
    case BeamPolicy::Optimal:
      gain = h.dot(d.llt().solve(h)).real();
      break;
  }
  const double w = 1.0 / (c.offload_ratio * scenario.task_bits[k]);
  return w * c.subband_bandwidth * std::log2(1.0 + decision.tx_power[k] * gain);
}

double node_bound(const Allocation& partial, const ResourceDecision& decision, const Scenario& scenario,
                  BeamPolicy beams) {
  double bound = std::numeric_limits<double>::infinity();
  for (int k = 0; k < partial.num_vehicles(); ++k) {
    if (partial.band(k) >= 0) bound = std::min(bound, weighted_rate(k, partial, decision, scenario, beams));
  }
  return bound;
}

bool partial_sensing_feasible(const Allocation& partial, const Eigen::VectorXd& powers, const Scenario& scenario) {
  const double threshold = scenario.config.sinr_threshold;
  for (int k = 0; k < partial.num_vehicles(); ++k) {
    if (partial.band(k) < 0) continue;
    if (sensing_sinr(k, partial, powers, scenario) < threshold) return false;
  }
  return true;
}

double min_sensing_sinr(const Allocation& partial, const Eigen::VectorXd& powers, const Scenario& scenario) {
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < partial.num_vehicles(); ++k) {
    if (partial.band(k) >= 0) worst = std::min(worst, sensing_sinr(k, partial, powers, scenario));
  }
  return worst;
}

std::vector<int> vehicle_order(const ResourceDecision& decision, const Scenario& scenario, VehicleOrder order) {
  const int K = scenario.config.num_vehicles;
  std::vector<int> idx(K);
  std::iota(idx.begin(), idx.end(), 0);
  if (order == VehicleOrder::DescendingInterference) {
    const Eigen::MatrixXd metric = interference_matrix(decision.tx_power, scenario.channels);
    const Eigen::VectorXd total = metric.rowwise().sum() + metric.colwise().sum().transpose();
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return total[a] > total[b]; });
  }
  return idx;
}

BnbResult bnb_allocate(const ResourceDecision& decision, const Scenario& scenario, const Allocation& warm_start,
                       const BnbOptions& options) {
  return beam_search(decision, scenario, warm_start, options, [&](const Allocation& a) {
    return node_bound(a, decision, scenario, options.beams);
  });
}

BnbResult bnb_allocate_sensing(const ResourceDecision& decision, const Scenario& scenario,
                               const Allocation& warm_start, const BnbOptions& options) {
  return beam_search(decision, scenario, warm_start, options, [&](const Allocation& a) {
    return min_sensing_sinr(a, decision.tx_power, scenario);
  });
}

Allocation brute_force_allocate(const ResourceDecision& decision, const Scenario& scenario, BeamPolicy beams,
                                bool sensing_constraint) {
  const int K = scenario.config.num_vehicles;
  const int L = scenario.config.num_subbands;
  const double leaves = std::pow(static_cast<double>(L), K);
  if (leaves > 1e6) throw std::length_error("brute-force search limited to L^K <= 1e6 allocations");

  std::vector<int> bands(K, 0);
  Allocation best(L, K);
  double best_value = kNegInf;
  for (long long leaf = 0; leaf < static_cast<long long>(leaves); ++leaf) {
    // Vehicle 0 is the most significant digit, so leaves come in lexicographic order.
    long long rest = leaf;
    for (int k = K - 1; k >= 0; --k) {
      bands[k] = static_cast<int>(rest % L);
      rest /= L;
    }
    const Allocation a = Allocation::from_bands(bands, L);
    if (sensing_constraint && !partial_sensing_feasible(a, decision.tx_power, scenario)) continue;
    const double v = node_bound(a, decision, scenario, beams);
    if (v > best_value) {
      best_value = v;
      best = a;
    }
  }
  return best;
}

}  // namespace iscc
