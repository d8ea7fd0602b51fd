#include "iscc/power_sca.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "iscc/barrier.hpp"
#include "iscc/linalg.hpp"

namespace iscc {
namespace {

constexpr double kMinCpuFraction = 1e-6;
constexpr double kLn2 = 0.69314718055994530942;

/// Normalized problem data: p~ = p / P_max, f~ = f / F_l, latencies in units of tau0.
struct Instance {
  int K = 0;
  double P = 0.0, Fl = 0.0, tau0 = 0.0, beta = 0.0, noise = 0.0;
  Eigen::VectorXd a, c;     // local / offload latency coefficients
  Eigen::VectorXd own;      // P |u_k^H h_k|^2
  Eigen::MatrixXd cross;    // (k, i): P |u_k^H h_i|^2 for co-channel i != k
  bool sensing = false;
  Eigen::MatrixXd coupling; // (k, i): Gamma |g_ik|^2 / (N_s alpha_k^2) for co-channel i != k
  Eigen::VectorXd floor;    // Gamma sigma_r^2 / (N_s alpha_k^2 P)

  Instance(const Allocation& alloc, const Eigen::MatrixXcd& beams, const Scenario& s, bool with_sensing) {
    const auto& cfg = s.config;
    K = alloc.num_vehicles();
    if (!alloc.complete()) throw std::invalid_argument("power optimization needs a complete allocation");
    P = cfg.max_power;
    Fl = cfg.max_local_cpu;
    beta = cfg.power_coeff * Fl * Fl * Fl / P;
    noise = cfg.noise_power_bs;
    tau0 = (s.task_bits.array() * cfg.local_intensity / Fl).maxCoeff();
    a = s.task_bits * cfg.local_intensity / (Fl * tau0);
    c = s.task_bits * cfg.offload_ratio / (cfg.subband_bandwidth * tau0);

    own.resize(K);
    cross = Eigen::MatrixXd::Zero(K, K);
    for (int k = 0; k < K; ++k) {
      const int l = alloc.band(k);
      const auto& H = s.channels.uplink(l, s.association.serving_bs[k]);
      own[k] = P * combining_gain(beams.col(k), H.col(k));
      for (int i = 0; i < K; ++i) {
        if (i != k && alloc.band(i) == l) cross(k, i) = P * combining_gain(beams.col(k), H.col(i));
      }
    }

    sensing = with_sensing && cfg.sinr_threshold > 0.0;
    coupling = Eigen::MatrixXd::Zero(K, K);
    floor = Eigen::VectorXd::Zero(K);
    if (sensing) {
      for (int k = 0; k < K; ++k) {
        const double alpha = s.channels.sensing_amp_min[k];
        const double scale = cfg.sinr_threshold / (cfg.accum_symbols * alpha * alpha);
        const auto& g = s.channels.cross(alloc.band(k));
        for (int i = 0; i < K; ++i) {
          if (i != k && alloc.band(i) == alloc.band(k)) coupling(k, i) = scale * std::norm(g(i, k));
        }
        floor[k] = scale * cfg.noise_power_radar / P;
      }
    }
  }

  [[nodiscard]] int dim() const { return 3 * K + 2; }
  [[nodiscard]] Eigen::VectorXd interference(const Eigen::VectorXd& pn) const {
    return (cross * pn).array() + noise;
  }
  [[nodiscard]] Eigen::VectorXd sinr(const Eigen::VectorXd& pn) const {
    return own.cwiseProduct(pn).cwiseQuotient(interference(pn));
  }
};

/// Variables x = [p~ (K), f~ (K), r (K), mu1, mu2]; constraint blocks of K rows:
/// local latency, offload latency, rate surrogate, budget, f~ <= 1,
/// f~ >= floor, p~ >= 0, r >= 0 and, when enabled, echo SINR.
class Subproblem final : public BarrierProblem {
 public:
  Subproblem(const Instance& inst, const ScaAnchors& anchors)
      : in_(inst), K_(inst.K), m_((inst.sensing ? 9 : 8) * inst.K), obj_(Eigen::VectorXd::Zero(inst.dim())) {
    obj_[3 * K_] = 1.0;
    obj_[3 * K_ + 1] = 1.0;
    e2_ = (-anchors.v2).array().exp();
    e3_ = (-anchors.v3).array().exp();
    // Constant part of the rate row: v2 + v3 - 2 - ln(own).
    offset_ = anchors.v2.array() + anchors.v3.array() - 2.0 - in_.own.array().log();
  }

  [[nodiscard]] int dimension() const override { return in_.dim(); }
  [[nodiscard]] int num_constraints() const override { return m_; }
  [[nodiscard]] const Eigen::VectorXd& objective() const override { return obj_; }

  bool constraints(const Eigen::VectorXd& x, Eigen::VectorXd& g) const override {
    const auto p = x.segment(0, K_);
    const auto f = x.segment(K_, K_);
    const auto r = x.segment(2 * K_, K_);
    if ((p.array() <= 0.0).any() || (f.array() <= 0.0).any() || (r.array() <= 0.0).any()) return false;
    const double mu1 = x[3 * K_], mu2 = x[3 * K_ + 1];
    const Eigen::VectorXd interf = in_.interference(p);
    for (int k = 0; k < K_; ++k) {
      g[k] = in_.a[k] / f[k] - mu1;
      g[K_ + k] = in_.c[k] / r[k] - mu2;
      g[2 * K_ + k] = e3_[k] * std::expm1(kLn2 * r[k]) - std::log(p[k]) + e2_[k] * interf[k] + offset_[k];
      g[3 * K_ + k] = p[k] + in_.beta * f[k] * f[k] * f[k] - 1.0;
      g[4 * K_ + k] = f[k] - 1.0;
      g[5 * K_ + k] = kMinCpuFraction - f[k];
      g[6 * K_ + k] = -p[k];
      g[7 * K_ + k] = -r[k];
    }
    if (in_.sensing) g.segment(8 * K_, K_) = in_.coupling * p + in_.floor - p;
    return g.allFinite();
  }

  void jacobian(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const override {
    const auto p = x.segment(0, K_);
    const auto f = x.segment(K_, K_);
    const auto r = x.segment(2 * K_, K_);
    jac.setZero();
    for (int k = 0; k < K_; ++k) {
      const int pk = k, fk = K_ + k, rk = 2 * K_ + k;
      jac(k, fk) = -in_.a[k] / (f[k] * f[k]);
      jac(k, 3 * K_) = -1.0;
      jac(K_ + k, rk) = -in_.c[k] / (r[k] * r[k]);
      jac(K_ + k, 3 * K_ + 1) = -1.0;
      jac.row(2 * K_ + k).head(K_) = e2_[k] * in_.cross.row(k);
      jac(2 * K_ + k, pk) += -1.0 / p[k];
      jac(2 * K_ + k, rk) = e3_[k] * kLn2 * std::exp2(r[k]);
      jac(3 * K_ + k, pk) = 1.0;
      jac(3 * K_ + k, fk) = 3.0 * in_.beta * f[k] * f[k];
      jac(4 * K_ + k, fk) = 1.0;
      jac(5 * K_ + k, fk) = -1.0;
      jac(6 * K_ + k, pk) = -1.0;
      jac(7 * K_ + k, rk) = -1.0;
      if (in_.sensing) {
        jac.row(8 * K_ + k).head(K_) = in_.coupling.row(k);
        jac(8 * K_ + k, pk) -= 1.0;
      }
    }
  }

  void add_weighted_hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& w, Eigen::MatrixXd& h) const override {
    const auto p = x.segment(0, K_);
    const auto f = x.segment(K_, K_);
    const auto r = x.segment(2 * K_, K_);
    for (int k = 0; k < K_; ++k) {
      const int pk = k, fk = K_ + k, rk = 2 * K_ + k;
      h(fk, fk) += w[k] * 2.0 * in_.a[k] / (f[k] * f[k] * f[k]);
      h(rk, rk) += w[K_ + k] * 2.0 * in_.c[k] / (r[k] * r[k] * r[k]);
      h(rk, rk) += w[2 * K_ + k] * e3_[k] * kLn2 * kLn2 * std::exp2(r[k]);
      h(pk, pk) += w[2 * K_ + k] / (p[k] * p[k]);
      h(fk, fk) += w[3 * K_ + k] * 6.0 * in_.beta * f[k];
    }
  }

 private:
  const Instance& in_;
  int K_, m_;
  Eigen::VectorXd obj_, e2_, e3_, offset_;
};

ScaAnchors tight_anchors(const Instance& in, const Eigen::VectorXd& pn) {
  const Eigen::VectorXd interf = in.interference(pn);
  // Anchors are kept in absolute units (W); I~ = I in W since own/cross carry P.
  return {interf.array().log(), in.sinr(pn).array().log()};
}

/// Barrier start from physical (p, f): r at half the achievable SINR and
/// 5% slack on both latency bounds.
Eigen::VectorXd start_point(const Instance& in, const Eigen::VectorXd& p, const Eigen::VectorXd& f) {
  const int K = in.K;
  Eigen::VectorXd x(in.dim());
  x.segment(0, K) = p / in.P;
  x.segment(K, K) = (f / in.Fl).cwiseMin(1.0 - 1e-7).cwiseMax(2.0 * kMinCpuFraction);
  const Eigen::VectorXd sinr = in.sinr(x.segment(0, K));
  x.segment(2 * K, K) = (0.5 * sinr).array().log1p() / kLn2;
  x[3 * K] = 1.05 * in.a.cwiseQuotient(x.segment(K, K)).maxCoeff();
  x[3 * K + 1] = 1.05 * in.c.cwiseQuotient(x.segment(2 * K, K)).maxCoeff();
  return x;
}

/// Physical solution at x, with r and both latency bounds tightened to their
/// exact values at (p, f).
ScaSolution polish(const Instance& in, const Eigen::VectorXd& x) {
  const int K = in.K;
  const Eigen::VectorXd pn = x.segment(0, K);
  const Eigen::VectorXd fn = x.segment(K, K);
  ScaSolution s;
  s.tx_power = pn * in.P;
  s.local_cpu = fn * in.Fl;
  const Eigen::VectorXd sinr = in.sinr(pn);
  s.rate = sinr.array().log1p() / kLn2;
  s.mu1 = in.tau0 * in.a.cwiseQuotient(fn).maxCoeff();
  s.mu2 = in.tau0 * in.c.cwiseQuotient(s.rate).maxCoeff();
  s.c1 = in.own.cwiseProduct(pn);
  s.c2 = in.interference(pn);
  s.v1 = s.c1.array().log();
  s.v2 = s.c2.array().log();
  s.v3 = sinr.array().log();
  s.interior = x;
  return s;
}

}  // namespace

std::optional<Eigen::VectorXd> min_sensing_powers(const Allocation& alloc, const Scenario& scenario,
                                                  double threshold) {
  const auto& cfg = scenario.config;
  const int K = alloc.num_vehicles();
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(K, K);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K);
  for (int k = 0; k < K; ++k) {
    const int l = alloc.band(k);
    if (l < 0) continue;
    const double alpha = scenario.channels.sensing_amp_min[k];
    const double scale = threshold / (cfg.accum_symbols * alpha * alpha);
    const auto& g = scenario.channels.cross(l);
    for (int i = 0; i < K; ++i) {
      if (i != k && alloc.band(i) == l) coupling(k, i) = scale * std::norm(g(i, k));
    }
    rhs[k] = scale * cfg.noise_power_radar;
  }
  if (threshold <= 0.0) return rhs;
  const double radius = coupling.eigenvalues().cwiseAbs().maxCoeff();
  if (!(radius < 1.0)) return std::nullopt;
  Eigen::VectorXd p = (Eigen::MatrixXd::Identity(K, K) - coupling).partialPivLu().solve(rhs);
  if (!p.allFinite() || (p.array() < 0.0).any()) return std::nullopt;
  return p;
}

double max_common_threshold(const Allocation& alloc, const Scenario& scenario, std::optional<double> power_cap) {
  const double budget = power_cap.value_or(scenario.config.max_power);
  auto reachable = [&](double t) {
    const auto p = min_sensing_powers(alloc, scenario, t);
    return p && p->maxCoeff() < budget;
  };
  double lo = 0.0, hi = std::max(scenario.config.sinr_threshold, 1.0);
  while (reachable(hi) && hi < 1e12) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (reachable(mid) ? lo : hi) = mid;
  }
  return lo;
}

Eigen::VectorXd max_min_sensing_powers(const Allocation& alloc, const Scenario& scenario, double power_cap) {
  const double t = max_common_threshold(alloc, scenario, power_cap);
  const auto p = min_sensing_powers(alloc, scenario, t);
  const int K = alloc.num_vehicles();
  if (!p || !(p->maxCoeff() > 0.0)) return Eigen::VectorXd::Constant(K, power_cap);
  // Scaling all powers up together only raises every echo SINR.
  return *p * (power_cap / p->maxCoeff());
}

ScaAnchors anchors_at(const Eigen::VectorXd& tx_power, const Allocation& alloc, const Eigen::MatrixXcd& beamformers,
                      const Scenario& scenario) {
  const Instance in(alloc, beamformers, scenario, false);
  return tight_anchors(in, tx_power / in.P);
}

ScaSolution init_feasible(const Allocation& alloc, const Eigen::MatrixXcd& beamformers, const Scenario& scenario,
                          bool sensing_constraint) {
  const auto& cfg = scenario.config;
  const Instance in(alloc, beamformers, scenario, sensing_constraint);
  const int K = in.K;
  const double P = cfg.max_power, kappa = cfg.power_coeff;
  const double f0 = std::min(cfg.max_local_cpu, std::cbrt(P / (2.0 * kappa)));

  Eigen::VectorXd p;
  if (in.sensing) {
    const auto p_min = min_sensing_powers(alloc, scenario, cfg.sinr_threshold);
    if (!p_min) throw SensingInfeasible("echo-SINR threshold unreachable for this sub-band allocation");
    const double peak = p_min->maxCoeff();
    if (!(peak < P)) throw SensingInfeasible("echo-SINR threshold needs more than the power budget");
    // A uniform scale keeps every coupled row satisfied.
    p = std::min(1.1, 0.5 * (1.0 + P / peak)) * *p_min;
  } else {
    p = Eigen::VectorXd::Constant(K, 0.5 * (P - kappa * f0 * f0 * f0));
  }

  Eigen::VectorXd f(K);
  for (int k = 0; k < K; ++k) {
    f[k] = p[k] + kappa * f0 * f0 * f0 < P ? f0 : std::cbrt(0.5 * (P - p[k]) / kappa);
  }

  ScaSolution s = polish(in, start_point(in, p, f));
  s.trace = {s.objective()};
  return s;
}

ScaSolution solve_subproblem(const ScaAnchors& anchors, const ScaSolution& start, const Allocation& alloc,
                             const Eigen::MatrixXcd& beamformers, const Scenario& scenario,
                             const ScaOptions& options) {
  const Instance in(alloc, beamformers, scenario, options.sensing_constraint);
  const Subproblem problem(in, anchors);
  const Eigen::VectorXd x0 =
      start.interior.size() == in.dim() ? start.interior : start_point(in, start.tx_power, start.local_cpu);
  const auto feasible = find_strictly_feasible(problem, x0);
  if (!feasible) {
    ScaSolution out = start;
    out.stalled = true;
    return out;
  }
  const BarrierResult r = barrier_minimize(problem, *feasible);
  ScaSolution out = polish(in, r.x);
  out.trace = start.trace;
  out.iterations = start.iterations + 1;
  return out;
}

ScaSolution sca_optimize(const Allocation& alloc, const Eigen::MatrixXcd& beamformers, const Scenario& scenario,
                         const ScaOptions& options, const ResourceDecision* start) {
  const Instance in(alloc, beamformers, scenario, options.sensing_constraint);

  ScaSolution best;
  bool have_start = false;
  if (start != nullptr) {
    const Eigen::VectorXd x0 = start_point(in, start->tx_power, start->local_cpu);
    const Subproblem probe(in, tight_anchors(in, x0.head(in.K)));
    if (const auto x = find_strictly_feasible(probe, x0)) {
      best = polish(in, *x);
      have_start = true;
    }
  }
  if (!have_start) best = init_feasible(alloc, beamformers, scenario, options.sensing_constraint);
  best.trace = {best.objective()};
  best.iterations = 0;

  for (int it = 0; it < options.max_iterations; ++it) {
    const ScaAnchors anchors = tight_anchors(in, best.interior.head(in.K));
    ScaSolution next = solve_subproblem(anchors, best, alloc, beamformers, scenario, options);
    if (next.stalled) {
      best.stalled = true;
      break;
    }
    if (next.objective() > best.objective()) break;
    const double change = (best.objective() - next.objective()) / best.objective();
    next.trace.push_back(next.objective());
    best = std::move(next);
    if (change <= options.tolerance) break;
  }
  return best;
}

}  // namespace iscc
