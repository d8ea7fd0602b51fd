#include "iscc/barrier.hpp"

#include <cmath>
#include <limits>

namespace iscc {
namespace {

using StopRule = std::function<bool(const Eigen::VectorXd&)>;

/// Barrier value t c^T x - sum log(-g); +inf outside the strict interior.
double barrier_value(const BarrierProblem& p, const Eigen::VectorXd& x, double t, Eigen::VectorXd& g) {
  if (!p.constraints(x, g) || !(g.array() < 0.0).all()) return std::numeric_limits<double>::infinity();
  return t * p.objective().dot(x) - (-g.array()).log().sum();
}

Eigen::VectorXd solve_spd(Eigen::MatrixXd h, const Eigen::VectorXd& rhs) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
  double ridge = 1e-14 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
  for (int attempt = 0; attempt < 12; ++attempt) {
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0.0).all()) {
      Eigen::VectorXd dx = ldlt.solve(rhs);
      if (dx.allFinite()) return dx;
    }
    h.diagonal().array() += ridge;
    ridge *= 10.0;
    ldlt.compute(h);
  }
  return ldlt.solve(rhs);
}

/// Returns false when the stop rule fired.
bool center(const BarrierProblem& p, Eigen::VectorXd& x, double t, const BarrierOptions& opt, const StopRule& stop,
            int& newton_steps) {
  const int n = p.dimension();
  const int m = p.num_constraints();
  Eigen::VectorXd g(m), g_trial(m);
  Eigen::MatrixXd jac(m, n), h(n, n);

  double value = barrier_value(p, x, t, g);
  for (int it = 0; it < opt.max_newton; ++it) {
    const Eigen::VectorXd inv = (-g).cwiseInverse();
    p.jacobian(x, jac);
    const Eigen::VectorXd grad = t * p.objective() + jac.transpose() * inv;
    h.noalias() = jac.transpose() * inv.cwiseAbs2().asDiagonal() * jac;
    p.add_weighted_hessian(x, inv, h);

    const Eigen::VectorXd dx = solve_spd(h, -grad);
    const double slope = grad.dot(dx);
    if (!(slope < 0.0) || -slope / 2.0 <= opt.newton_tol) break;

    double step = 1.0;
    Eigen::VectorXd trial;
    double trial_value = std::numeric_limits<double>::infinity();
    for (int ls = 0; ls < 80; ++ls, step *= 0.5) {
      trial = x + step * dx;
      trial_value = barrier_value(p, trial, t, g_trial);
      if (trial_value <= value + 0.25 * step * slope) break;
    }
    if (!std::isfinite(trial_value) || trial_value > value) break;
    x = trial;
    g = g_trial;
    const double previous = value;
    value = trial_value;
    ++newton_steps;
    if (stop && stop(x)) return false;
    if (previous - value <= 1e-15 * std::max(1.0, std::abs(value))) break;
  }
  return true;
}

BarrierResult follow_path(const BarrierProblem& p, const Eigen::VectorXd& x0, const BarrierOptions& opt,
                          const StopRule& stop) {
  const int m = p.num_constraints();
  BarrierResult r;
  r.x = x0;
  const double scale = std::max(1.0, std::abs(p.objective().dot(x0)));
  double t = std::max(1.0, m / scale);
  for (int outer = 0; outer < opt.max_centering; ++outer) {
    if (!center(p, r.x, t, opt, stop, r.newton_steps)) {
      r.gap = m / t;
      r.objective = p.objective().dot(r.x);
      return r;
    }
    r.gap = m / t;
    r.objective = p.objective().dot(r.x);
    if (r.gap <= opt.relative_gap * std::max(1.0, std::abs(r.objective))) {
      r.converged = true;
      break;
    }
    t *= opt.t_growth;
  }
  return r;
}

/// min s  s.t.  g_i(x) - s <= 0,  -1 - s <= 0
class PhaseOne final : public BarrierProblem {
 public:
  explicit PhaseOne(const BarrierProblem& inner)
      : inner_(inner), n_(inner.dimension()), m_(inner.num_constraints()), c_(Eigen::VectorXd::Zero(n_ + 1)),
        g_(m_), jac_(m_, n_) {
    c_[n_] = 1.0;
  }

  [[nodiscard]] int dimension() const override { return n_ + 1; }
  [[nodiscard]] int num_constraints() const override { return m_ + 1; }
  [[nodiscard]] const Eigen::VectorXd& objective() const override { return c_; }

  bool constraints(const Eigen::VectorXd& x, Eigen::VectorXd& g) const override {
    if (!inner_.constraints(x.head(n_), g_)) return false;
    g.head(m_) = g_.array() - x[n_];
    g[m_] = -1.0 - x[n_];
    return true;
  }
  void jacobian(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const override {
    inner_.jacobian(x.head(n_), jac_);
    jac.setZero();
    jac.topLeftCorner(m_, n_) = jac_;
    jac.col(n_).head(m_).setConstant(-1.0);
    jac(m_, n_) = -1.0;
  }
  void add_weighted_hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& w, Eigen::MatrixXd& h) const override {
    Eigen::MatrixXd inner_h = h.topLeftCorner(n_, n_);
    inner_.add_weighted_hessian(x.head(n_), w.head(m_), inner_h);
    h.topLeftCorner(n_, n_) = inner_h;
  }

 private:
  const BarrierProblem& inner_;
  int n_, m_;
  Eigen::VectorXd c_;
  mutable Eigen::VectorXd g_;
  mutable Eigen::MatrixXd jac_;
};

}  // namespace

bool strictly_feasible(const BarrierProblem& problem, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(problem.num_constraints());
  return problem.constraints(x, g) && (g.array() < 0.0).all();
}

BarrierResult barrier_minimize(const BarrierProblem& problem, const Eigen::VectorXd& x0,
                               const BarrierOptions& options) {
  return follow_path(problem, x0, options, nullptr);
}

std::optional<Eigen::VectorXd> find_strictly_feasible(const BarrierProblem& problem, const Eigen::VectorXd& x0,
                                                      const BarrierOptions& options) {
  if (strictly_feasible(problem, x0)) return x0;
  Eigen::VectorXd g(problem.num_constraints());
  if (!problem.constraints(x0, g)) return std::nullopt;

  const int n = problem.dimension();
  PhaseOne phase_one(problem);
  Eigen::VectorXd y(n + 1);
  y.head(n) = x0;
  y[n] = std::max(g.maxCoeff(), 0.0) + 1.0;
  const BarrierResult r = follow_path(phase_one, y, options, [&](const Eigen::VectorXd& z) {
    return z[n] < 0.0 && strictly_feasible(problem, z.head(n));
  });
  if (r.x[n] < 0.0 && strictly_feasible(problem, r.x.head(n))) return Eigen::VectorXd(r.x.head(n));
  return std::nullopt;
}

}  // namespace iscc
