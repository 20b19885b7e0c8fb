#ifndef DROPSVM_SOLVER_HPP
#define DROPSVM_SOLVER_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace dropsvm {

/// Problems with at most this many unknowns are solved through the normal
/// equations; larger ones go through L-BFGS.
inline constexpr std::size_t kDenseThreshold = 2000;

/// Minimizer of 1/2 w'(gram + ridge * mask) w - rhs'w, where `mask` is the
/// identity with zeros at the `unpenalized` coordinates (the offset).
struct QuadraticProblem {
  Eigen::MatrixXd gram;
  Eigen::VectorXd rhs;
  double ridge = 0.0;
  std::vector<Eigen::Index> unpenalized;

  /// gram + ridge * mask.
  Eigen::MatrixXd system_matrix() const;
};

struct NormalSolution {
  Eigen::VectorXd w;
  bool used_fallback = false;  // Cholesky failed, solved by L-BFGS instead
};

/// Solves the regularized normal equations with a Cholesky factorization.
NormalSolution solve_normal_equations(const QuadraticProblem& problem);

/// A differentiable objective: `eval(x, grad)` returns f(x) and writes the
/// gradient into `grad` (already sized to `dim`).
struct SmoothObjective {
  std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)> eval;
  Eigen::Index dim = 0;
};

struct LbfgsOptions {
  double tol = 1e-5;      // stop when ||grad||_inf <= tol
  int max_iter = 200;
  int memory = 10;
  double armijo = 1e-4;   // sufficient-decrease constant
  int max_backtracks = 60;
};

enum class LbfgsStatus { Converged, MaxIterations, LineSearchFailed };

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  LbfgsStatus status = LbfgsStatus::MaxIterations;
};

/// Limited-memory BFGS with Armijo backtracking. Accepted iterates never
/// increase the objective, so the returned value is at most f(x0).
LbfgsResult minimize_lbfgs(const SmoothObjective& objective, const Eigen::VectorXd& x0,
                           const LbfgsOptions& options = {});

/// Max over coordinates of |analytic - numeric| / max(|analytic|, |numeric|,
/// 1e-8), with the numeric gradient from central differences of step h.
double check_gradient(const SmoothObjective& objective, const Eigen::VectorXd& x, double h);

/// The quadratic objective of `problem` as a SmoothObjective.
SmoothObjective quadratic_objective(const QuadraticProblem& problem);

}  // namespace dropsvm

#endif  // DROPSVM_SOLVER_HPP
