#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

namespace iscc {

/// Smooth convex program  min c^T x  s.t.  g_i(x) <= 0.
class BarrierProblem {
 public:
  virtual ~BarrierProblem() = default;

  [[nodiscard]] virtual int dimension() const = 0;
  [[nodiscard]] virtual int num_constraints() const = 0;
  [[nodiscard]] virtual const Eigen::VectorXd& objective() const = 0;

  /// Fills g(x). Returns false when x lies outside the functions' domain.
  virtual bool constraints(const Eigen::VectorXd& x, Eigen::VectorXd& g) const = 0;
  /// m x n Jacobian of g at x.
  virtual void jacobian(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const = 0;
  /// H += sum_i w_i * Hessian(g_i)(x).
  virtual void add_weighted_hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& w, Eigen::MatrixXd& h) const = 0;
};

struct BarrierOptions {
  double t_growth = 12.0;
  double relative_gap = 1e-8;  // stop once m/t <= relative_gap * max(1, |c^T x|)
  double newton_tol = 1e-10;   // half squared Newton decrement
  int max_newton = 200;        // per centering step
  int max_centering = 60;
};

struct BarrierResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  double gap = 0.0;  // duality gap bound m/t
  bool converged = false;
  int newton_steps = 0;
};

/// Log-barrier path following from a strictly feasible x0.
BarrierResult barrier_minimize(const BarrierProblem& problem, const Eigen::VectorXd& x0,
                               const BarrierOptions& options = {});

/// Strictly feasible point near x0, or nullopt when the phase-one problem
/// min s s.t. g_i(x) <= s cannot push s below zero. x0 must lie in the domain.
std::optional<Eigen::VectorXd> find_strictly_feasible(const BarrierProblem& problem, const Eigen::VectorXd& x0,
                                                      const BarrierOptions& options = {});

bool strictly_feasible(const BarrierProblem& problem, const Eigen::VectorXd& x);

}  // namespace iscc
