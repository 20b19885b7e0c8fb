#include "dropsvm/solver.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <memory>

#include "dropsvm/errors.hpp"

namespace dropsvm {

Eigen::MatrixXd QuadraticProblem::system_matrix() const {
  Eigen::MatrixXd a = gram;
  a.diagonal().array() += ridge;
  for (Eigen::Index i : unpenalized) a(i, i) -= ridge;
  return a;
}

SmoothObjective quadratic_objective(const QuadraticProblem& problem) {
  auto a = std::make_shared<Eigen::MatrixXd>(problem.system_matrix());
  auto b = std::make_shared<Eigen::VectorXd>(problem.rhs);
  SmoothObjective obj;
  obj.dim = b->size();
  obj.eval = [a, b](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.noalias() = (*a) * x;
    const double f = 0.5 * x.dot(g) - b->dot(x);
    g -= *b;
    return f;
  };
  return obj;
}

NormalSolution solve_normal_equations(const QuadraticProblem& problem) {
  const Eigen::Index n = problem.rhs.size();
  if (problem.gram.rows() != n || problem.gram.cols() != n) {
    throw DomainError("normal equations: gram/rhs dimension mismatch");
  }
  Eigen::MatrixXd a = problem.system_matrix();
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  NormalSolution out;
  if (llt.info() == Eigen::Success) {
    out.w = llt.solve(problem.rhs);
    if (out.w.allFinite()) return out;
  }
  warn("Cholesky factorization failed; falling back to L-BFGS");
  LbfgsOptions opts;
  opts.tol = 1e-10 * std::max(1.0, problem.rhs.lpNorm<Eigen::Infinity>());
  opts.max_iter = 10000;
  out.w = minimize_lbfgs(quadratic_objective(problem), Eigen::VectorXd::Zero(n), opts).x;
  out.used_fallback = true;
  return out;
}

LbfgsResult minimize_lbfgs(const SmoothObjective& objective, const Eigen::VectorXd& x0,
                           const LbfgsOptions& options) {
  const Eigen::Index n = x0.size();
  if (n != objective.dim) throw DomainError("L-BFGS: starting point has wrong dimension");

  LbfgsResult res;
  res.x = x0;
  Eigen::VectorXd g(n);
  res.value = objective.eval(res.x, g);
  if (!std::isfinite(res.value)) throw NumericError("L-BFGS: objective not finite at x0");

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  Eigen::VectorXd x_new(n), g_new(n), dir(n);
  std::vector<double> alpha(static_cast<std::size_t>(options.memory));

  for (int iter = 0; iter < options.max_iter; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() <= options.tol) {
      res.status = LbfgsStatus::Converged;
      res.iterations = iter;
      return res;
    }

    // two-loop recursion
    dir = -g;
    const std::size_t m = s_hist.size();
    for (std::size_t i = m; i-- > 0;) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(dir);
      dir -= alpha[i] * y_hist[i];
    }
    if (m > 0) dir *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < m; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(dir);
      dir += (alpha[i] - beta) * s_hist[i];
    }

    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      // not a descent direction; restart from steepest descent
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -g;
      slope = -g.squaredNorm();
    }

    double step = 1.0;
    if (s_hist.empty()) step = std::min(1.0, 1.0 / std::max(g.lpNorm<Eigen::Infinity>(), 1e-300));
    bool accepted = false;
    double f_new = 0.0;
    for (int bt = 0; bt < options.max_backtracks; ++bt) {
      x_new = res.x + step * dir;
      f_new = objective.eval(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= res.value + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.status = LbfgsStatus::LineSearchFailed;
      res.iterations = iter;
      return res;
    }

    Eigen::VectorXd s = x_new - res.x;
    Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    res.x = x_new;
    g = g_new;
    const double f_old = res.value;
    res.value = f_new;
    if (sy > 1e-12 * std::sqrt(s.squaredNorm() * y.squaredNorm())) {
      if (static_cast<int>(s_hist.size()) == options.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    if (f_old == f_new && step * dir.lpNorm<Eigen::Infinity>() == 0.0) {
      res.status = LbfgsStatus::LineSearchFailed;
      res.iterations = iter + 1;
      return res;
    }
  }
  res.iterations = options.max_iter;
  res.status = g.lpNorm<Eigen::Infinity>() <= options.tol ? LbfgsStatus::Converged
                                                          : LbfgsStatus::MaxIterations;
  return res;
}

double check_gradient(const SmoothObjective& objective, const Eigen::VectorXd& x, double h) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd analytic(n), scratch(n);
  objective.eval(x, analytic);
  Eigen::VectorXd xp = x;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = x[i];
    xp[i] = xi + h;
    const double fp = objective.eval(xp, scratch);
    xp[i] = xi - h;
    const double fm = objective.eval(xp, scratch);
    xp[i] = xi;
    const double numeric = (fp - fm) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace dropsvm
