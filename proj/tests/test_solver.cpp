#include <doctest.h>

#include <cmath>
#include <random>

#include "dropsvm/solver.hpp"

using namespace dropsvm;

namespace {

QuadraticProblem random_problem(Eigen::Index d, std::uint64_t seed, double ridge) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0, 1);
  Eigen::MatrixXd a(d + 3, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
  QuadraticProblem p;
  p.gram = a.transpose() * a;
  p.rhs.resize(d);
  for (auto& v : p.rhs) v = normal(rng);
  p.ridge = ridge;
  p.unpenalized = {d - 1};
  return p;
}

}  // namespace

TEST_CASE("identity system") {
  QuadraticProblem p;
  p.gram = Eigen::MatrixXd::Identity(2, 2);
  p.rhs = Eigen::Vector2d(3, 4);
  const NormalSolution s = solve_normal_equations(p);
  CHECK(s.w[0] == doctest::Approx(3.0));
  CHECK(s.w[1] == doctest::Approx(4.0));
  CHECK_FALSE(s.used_fallback);
}

TEST_CASE("one-dimensional re-weighted system is a scalar division") {
  // One example x~ with dropout: E[x~^2] = x^2 / (1 - q); ridge 2/c^2.
  const double c = 2.0, gamma = 0.3, x = 1.5, q = 0.4, yh = 1.7;
  const double ex2 = x * x / (1 - q);
  QuadraticProblem p;
  p.gram = Eigen::MatrixXd::Constant(1, 1, gamma * ex2);
  p.rhs = Eigen::VectorXd::Constant(1, gamma * x * yh);
  p.ridge = 2.0 / (c * c);
  const double expected = gamma * x * yh / (2.0 / (c * c) + gamma * ex2);
  CHECK(solve_normal_equations(p).w[0] == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("random SPD systems have small residuals") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const QuadraticProblem p = random_problem(20, seed, 0.5);
    const NormalSolution s = solve_normal_equations(p);
    const Eigen::VectorXd r = p.system_matrix() * s.w - p.rhs;
    CHECK(r.norm() <= 1e-8 * p.rhs.norm());
  }
}

TEST_CASE("system matrix leaves the offset unpenalized") {
  const QuadraticProblem p = random_problem(4, 1, 2.0);
  const Eigen::MatrixXd m = p.system_matrix();
  CHECK(m(3, 3) == p.gram(3, 3));
  CHECK(m(0, 0) == p.gram(0, 0) + 2.0);
}

TEST_CASE("indefinite system falls back to L-BFGS") {
  QuadraticProblem p;
  p.gram = Eigen::MatrixXd::Zero(2, 2);
  p.gram(0, 0) = 1.0;
  p.gram(1, 1) = -1e-30;  // numerically indefinite, unpenalized coordinate
  p.rhs = Eigen::Vector2d(1.0, 0.0);
  p.unpenalized = {1};
  const NormalSolution s = solve_normal_equations(p);
  CHECK(s.used_fallback);
  CHECK(s.w[0] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("L-BFGS on a quadratic bowl") {
  const Eigen::Vector3d a(1, 2, 3);
  SmoothObjective f;
  f.dim = 3;
  f.eval = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2 * (x - a);
    return (x - a).squaredNorm();
  };
  LbfgsOptions opt;
  opt.tol = 1e-9;
  const LbfgsResult r = minimize_lbfgs(f, Eigen::VectorXd::Zero(3), opt);
  CHECK((r.x - a).norm() < 1e-6);
  CHECK(r.status == LbfgsStatus::Converged);
}

TEST_CASE("L-BFGS solves Rosenbrock") {
  SmoothObjective f;
  f.dim = 2;
  f.eval = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double a = 1 - x[0], b = x[1] - x[0] * x[0];
    g[0] = -2 * a - 400 * x[0] * b;
    g[1] = 200 * b;
    return a * a + 100 * b * b;
  };
  LbfgsOptions opt;
  opt.tol = 1e-10;
  opt.max_iter = 1000;
  const LbfgsResult r = minimize_lbfgs(f, Eigen::Vector2d(-1.2, 1.0), opt);
  CHECK(std::abs(r.x[0] - 1) < 1e-4);
  CHECK(std::abs(r.x[1] - 1) < 1e-4);
}

TEST_CASE("L-BFGS agrees with the normal equations and never ascends") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const QuadraticProblem p = random_problem(15, seed + 10, 1.0);
    const NormalSolution direct = solve_normal_equations(p);
    LbfgsOptions opt;
    opt.tol = 1e-10;
    opt.max_iter = 2000;
    const SmoothObjective obj = quadratic_objective(p);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(15, 0.3);
    const LbfgsResult r = minimize_lbfgs(obj, x0, opt);
    CHECK((r.x - direct.w).norm() <= 1e-5 * direct.w.norm());
    Eigen::VectorXd g(15);
    CHECK(r.value <= obj.eval(x0, g));
  }
}

TEST_CASE("gradient checker") {
  const QuadraticProblem p = random_problem(6, 3, 1.0);
  const SmoothObjective good = quadratic_objective(p);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(6, -1, 1);
  CHECK(check_gradient(good, x, 1e-5) <= 1e-6);

  SmoothObjective bad = good;
  bad.eval = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
    const double f = good.eval(v, g);
    g[2] *= 2;
    return f;
  };
  CHECK(check_gradient(bad, x, 1e-5) >= 0.3);
}
