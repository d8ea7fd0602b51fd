#include "iscc/orchestrator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "iscc/closed_forms.hpp"
#include "iscc/power_sca.hpp"
#include "iscc/subband_bnb.hpp"
#include "iscc/subband_greedy.hpp"

namespace iscc {
namespace {

constexpr std::uint64_t kRandomBandStream = 0x5253424100000001ULL;

enum class SubbandStep { RateBnb, SensingBnb, Computing, Fixed };

// Sca minimizes latency; Fixed keeps the even budget split; MaxMinSensing
// keeps the local CPU at the even split and spends the rest of the budget on
// the best common echo SINR.
enum class PowerStep { Sca, Fixed, MaxMinSensing };

struct Plan {
  SubbandStep subband = SubbandStep::RateBnb;
  bool sensing = true;
  PowerStep power = PowerStep::Sca;
  bool optimal_beams = true;
};

Plan plan_for(Scheme s) {
  switch (s) {
    case Scheme::Joint: return {};
    case Scheme::Ccra: return {SubbandStep::Computing, false, PowerStep::Sca, true};
    case Scheme::Scra: return {SubbandStep::SensingBnb, true, PowerStep::MaxMinSensing, true};
    case Scheme::Rsba: return {SubbandStep::Fixed, true, PowerStep::Sca, true};
    case Scheme::Fpcr: return {SubbandStep::RateBnb, true, PowerStep::Fixed, true};
    case Scheme::Mrc: return {SubbandStep::RateBnb, true, PowerStep::Sca, false};
  }
  return {};
}

Eigen::MatrixXcd beams_for(const Plan& plan, const Allocation& a, const Eigen::VectorXd& p, const Scenario& s) {
  return plan.optimal_beams ? optimal_beamformers(a, p, s) : matched_beamformers(a, s);
}

BeamPolicy policy_for(const Plan& plan) { return plan.optimal_beams ? BeamPolicy::Optimal : BeamPolicy::Matched; }

double objective(const Allocation& a, const ResourceDecision& d, const Scenario& s) { return max_latency(a, d, s); }

class Loop {
 public:
  Loop(Scheme scheme, const Scenario& scenario) : plan_(plan_for(scheme)), base_(scenario), active_(&scenario) {
    result_.scheme = scheme;
    const auto& c = scenario.config;
    result_.enforced_threshold = plan_.sensing ? c.sinr_threshold : 0.0;
    result_.bnb_evaluation_limit = static_cast<std::size_t>(c.num_vehicles) * c.num_subbands * c.beam_width;
  }

  RunResult run() {
    initialize();
    const auto& c = base_.config;
    double current = objective(alloc_, d_, *active_);
    result_.initial_objective = current;
    for (int it = 0; it < c.max_outer_iters; ++it) {
      subband_step();
      power_step();
      beam_step();
      const double next = objective(alloc_, d_, *active_);
      result_.trace.push_back(next);
      const bool settled = std::abs(current - next) <= c.outer_tol * current;
      current = next;
      if (settled) {
        result_.converged = true;
        break;
      }
    }
    result_.allocation = alloc_;
    result_.decision = d_;
    result_.report = evaluate(alloc_, d_, base_);
    result_.report.trace = result_.trace;
    return std::move(result_);
  }

 private:
  [[nodiscard]] BnbOptions bnb_options() const {
    return {active_->config.beam_width, policy_for(plan_), plan_.sensing, VehicleOrder::Natural};
  }

  [[nodiscard]] Allocation greedy_warm_start() const {
    return greedy_allocate(interference_matrix(d_.tx_power, active_->channels), active_->config.num_subbands);
  }

  void initialize() {
    const auto& c = base_.config;
    const int K = c.num_vehicles;
    d_.tx_power = Eigen::VectorXd::Constant(K, 0.5 * c.max_power);
    d_.local_cpu = Eigen::VectorXd::Constant(K, std::min(c.max_local_cpu, std::cbrt(0.5 * c.max_power / c.power_coeff)));
    d_.mec_cpu = mec_allocate(base_.association, base_.task_bits, c);

    switch (plan_.subband) {
      case SubbandStep::Computing:
        d_.beamformers = Eigen::MatrixXcd::Zero(c.num_antennas, K);
        alloc_ = ccra_allocate(d_, base_);
        break;
      case SubbandStep::Fixed:
        alloc_ = random_allocate(base_);
        break;
      default:
        alloc_ = greedy_warm_start();
        break;
    }
    d_.beamformers = matched_beamformers(alloc_, base_);
    if (plan_.power == PowerStep::Fixed) return;
    if (plan_.power == PowerStep::MaxMinSensing) {
      d_.tx_power = max_min_sensing_powers(alloc_, base_, sensing_power_cap());
      return;
    }

    if (try_init()) return;
    if (plan_.subband != SubbandStep::Fixed) {
      // A sensing-centric allocation gives the power step a feasible start.
      const BnbResult r = bnb_allocate_sensing(d_, base_, alloc_, bnb_options());
      if (!r.sensing_infeasible) {
        alloc_ = r.allocation;
        d_.beamformers = matched_beamformers(alloc_, base_);
        if (try_init()) return;
      }
    }
    relax_threshold();
    try_init();
  }

  bool try_init() {
    try {
      const ScaSolution s = init_feasible(alloc_, d_.beamformers, *active_, plan_.sensing);
      d_.tx_power = s.tx_power;
      d_.local_cpu = s.local_cpu;
      return true;
    } catch (const SensingInfeasible&) {
      return false;
    }
  }

  void relax_threshold() {
    relaxed_ = base_;
    const double reachable = max_common_threshold(alloc_, base_);
    relaxed_->config.sinr_threshold = 0.95 * reachable;
    active_ = &*relaxed_;
    result_.threshold_relaxed = true;
    result_.enforced_threshold = relaxed_->config.sinr_threshold;
  }

  [[nodiscard]] bool sensing_ok(const Allocation& a, const Eigen::VectorXd& p) const {
    return !plan_.sensing || partial_sensing_feasible(a, p, *active_);
  }

  void subband_step() {
    const auto& s = *active_;
    Allocation candidate;
    switch (plan_.subband) {
      case SubbandStep::Fixed:
        result_.bnb_evaluations.push_back(0);
        return;
      case SubbandStep::Computing:
        candidate = ccra_allocate(d_, s);
        result_.bnb_evaluations.push_back(0);
        break;
      case SubbandStep::RateBnb: {
        const BnbResult r = bnb_allocate(d_, s, greedy_warm_start(), bnb_options());
        result_.bnb_evaluations.push_back(r.node_evaluations);
        candidate = r.allocation;
        break;
      }
      case SubbandStep::SensingBnb: {
        const BnbResult r = bnb_allocate_sensing(d_, s, greedy_warm_start(), bnb_options());
        result_.bnb_evaluations.push_back(r.node_evaluations);
        candidate = r.allocation;
        break;
      }
    }
    if (candidate == alloc_) return;

    const bool current_ok = sensing_ok(alloc_, d_.tx_power);
    if (!sensing_ok(candidate, d_.tx_power) && current_ok) return;

    ResourceDecision trial = d_;
    trial.beamformers = beams_for(plan_, candidate, d_.tx_power, s);
    bool accept = false;
    if (plan_.subband == SubbandStep::SensingBnb) {
      accept = min_sensing_sinr(candidate, d_.tx_power, s) > min_sensing_sinr(alloc_, d_.tx_power, s);
    } else {
      accept = !current_ok || objective(candidate, trial, s) < objective(alloc_, d_, s);
    }
    if (accept) {
      alloc_ = std::move(candidate);
      d_ = std::move(trial);
    }
  }

  [[nodiscard]] double sensing_power_cap() const {
    const auto& c = base_.config;
    const double f = d_.local_cpu[0];
    return c.max_power - c.power_coeff * f * f * f;
  }

  void power_step() {
    if (plan_.power == PowerStep::Fixed) return;
    const auto& s = *active_;
    if (plan_.power == PowerStep::MaxMinSensing) {
      // Max-min optimal for the current allocation, so never below the old minimum.
      d_.tx_power = max_min_sensing_powers(alloc_, s, sensing_power_cap());
      return;
    }
    ScaOptions opt;
    opt.sensing_constraint = plan_.sensing;
    opt.tolerance = s.config.sca_tol;
    try {
      const ScaSolution sol = sca_optimize(alloc_, d_.beamformers, s, opt, &d_);
      result_.sca_iterations += static_cast<int>(sol.trace.size()) - 1;
      ResourceDecision trial = d_;
      trial.tx_power = sol.tx_power;
      trial.local_cpu = sol.local_cpu;
      const bool was_ok = sensing_ok(alloc_, d_.tx_power);
      if (objective(alloc_, trial, s) <= objective(alloc_, d_, s) || !was_ok) d_ = std::move(trial);
    } catch (const SensingInfeasible&) {
      // Keep the current powers; the sub-band step may still open room.
    }
  }

  void beam_step() {
    const auto& s = *active_;
    ResourceDecision trial = d_;
    trial.beamformers = beams_for(plan_, alloc_, d_.tx_power, s);
    if (objective(alloc_, trial, s) <= objective(alloc_, d_, s)) d_ = std::move(trial);
  }

  Plan plan_;
  const Scenario& base_;
  std::optional<Scenario> relaxed_;
  const Scenario* active_;
  Allocation alloc_;
  ResourceDecision d_;
  RunResult result_;
};

}  // namespace

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::Joint: return "JOINT";
    case Scheme::Ccra: return "CCRA";
    case Scheme::Scra: return "SCRA";
    case Scheme::Rsba: return "RSBA";
    case Scheme::Fpcr: return "FPCR";
    case Scheme::Mrc: return "MRC";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view tag) {
  std::string upper(tag);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char ch) { return std::toupper(ch); });
  for (Scheme s : kAllSchemes) {
    if (scheme_name(s) == upper) return s;
  }
  return std::nullopt;
}

Allocation ccra_allocate(const ResourceDecision& decision, const Scenario& scenario) {
  const auto& c = scenario.config;
  const int K = c.num_vehicles;
  const int L = c.num_subbands;
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scenario.task_bits[a] > scenario.task_bits[b]; });

  Allocation alloc(L, K);
  for (int k : order) {
    int best_band = 0;
    double best = -1.0;
    for (int l = 0; l < L; ++l) {
      alloc.assign(k, l);
      const double v = node_bound(alloc, decision, scenario, BeamPolicy::Optimal);
      if (v > best) {
        best = v;
        best_band = l;
      }
    }
    alloc.assign(k, best_band);
  }
  return alloc;
}

Allocation random_allocate(const Scenario& scenario) {
  const int K = scenario.config.num_vehicles;
  const int L = scenario.config.num_subbands;
  std::mt19937_64 rng(derive_seed(scenario.seed, kRandomBandStream));
  std::vector<int> bands(K);
  for (int& b : bands) b = static_cast<int>(rng() % static_cast<std::uint64_t>(L));
  return Allocation::from_bands(bands, L);
}

RunResult run_joint(const Scenario& scenario) { return run_scheme(Scheme::Joint, scenario); }

RunResult run_scheme(Scheme scheme, const Scenario& scenario) {
  if (scenario.config.csi_error == 0.0) return Loop(scheme, scenario).run();
  // Optimize on the imperfect estimate, score on the true channels.
  RunResult r = Loop(scheme, estimated_scenario(scenario)).run();
  r.report = evaluate(r.allocation, r.decision, scenario);
  r.report.trace = r.trace;
  return r;
}

}  // namespace iscc
