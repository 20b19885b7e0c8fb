#ifndef DROPSVM_LATENT_HPP
#define DROPSVM_LATENT_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dropsvm/linear.hpp"

namespace dropsvm {

/// One sigmoid hidden layer feeding a linear classifier:
/// f(x) = w' g(x; alpha) + b with g_k(x) = sigmoid(alpha_k' x).
struct LatentModel {
  Eigen::MatrixXd alpha;  // D x K, column k maps inputs to hidden unit k
  Eigen::VectorXd w;      // K
  double b = 0.0;
  Loss loss = Loss::Hinge;
  NoiseModel noise;

  std::size_t dim() const { return static_cast<std::size_t>(alpha.rows()); }
  std::size_t hidden() const { return static_cast<std::size_t>(alpha.cols()); }
};

/// First-order expansion of g around the clean input. Only coordinates with
/// nonzero corruption variance get a Jacobian row.
struct TaylorMoments {
  Eigen::VectorXd g_mu;       // g(x), length K
  std::vector<Index> rows;    // input coordinates carrying variance
  Eigen::MatrixXd jac;        // rows.size() x K: g_k (1 - g_k) alpha(d, k)
  std::vector<double> var;    // variance of each row's coordinate

  /// Cov of the linearized hidden layer, jac' diag(var) jac (K x K).
  Eigen::MatrixXd hidden_covariance() const;
};

TaylorMoments taylor_moments(const SparseVector& x, const Eigen::MatrixXd& alpha,
                             const NoiseModel& noise);

/// Moments of zeta = ell - y f (hinge) or omega = f (logistic) under the
/// linearized hidden layer.
PerExampleStats latent_second_moment(const Eigen::VectorXd& w, double b,
                                     const TaylorMoments& tm, double y, double ell, Loss loss);

struct LatentOptions {
  std::size_t hidden = 8;
  double alpha_reg = 1.0;
  std::uint64_t seed = 0;
  int alpha_steps = 5;        // gradient steps on alpha per outer iteration
  double init_scale = 0.05;   // alpha ~ U[-init_scale, init_scale]
  bool freeze_alpha = false;  // keep alpha at its initial value
};

/// The approximate variational objective of the latent engines,
/// ||w||^2 + alpha_reg ||alpha||^2 + sum_n bound_n(w, b, alpha; gamma_n),
/// with gradients in (w, b) and alpha.
class LatentObjective {
 public:
  LatentObjective(const ExampleStream& data, const TrainConfig& cfg, double alpha_reg, Loss loss);

  /// Closed-form re-weights for the current parameters.
  std::vector<double> e_step(const LatentModel& model) const;

  double value(const LatentModel& model, const std::vector<double>& gamma) const;

  /// Value plus gradients; either gradient pointer may be null.
  double evaluate(const LatentModel& model, const std::vector<double>& gamma,
                  Eigen::VectorXd* grad_wb, Eigen::MatrixXd* grad_alpha) const;

  /// Objective over (w, b) with alpha and gamma held at the given values.
  SmoothObjective w_block(const LatentModel& model, const std::vector<double>& gamma) const;

  /// Objective over alpha (column-major vectorized) with w, b, gamma held.
  SmoothObjective alpha_block(const LatentModel& model, const std::vector<double>& gamma) const;

  /// Exact minimizer over (w, b) of the objective at fixed alpha and gamma.
  void solve_w(LatentModel& model, const std::vector<double>& gamma) const;

 private:
  const ExampleStream& data_;
  TrainConfig cfg_;
  double alpha_reg_;
  Loss loss_;
};

struct LatentTrace {
  /// Objective after every E-step, w-step and alpha-step, in order.
  std::vector<double> objective;
  int iterations = 0;
  bool converged = false;
  std::vector<double> gamma;
};

/// Alternates E-step, exact w-step and backtracking gradient steps on alpha.
/// Only hinge and logistic losses are supported.
LatentModel train_latent(const ExampleStream& data, Loss loss, const TrainConfig& cfg,
                         const LatentOptions& options, LatentTrace* trace = nullptr);

/// g(x; alpha), length K.
Eigen::VectorXd hidden_features(const Eigen::MatrixXd& alpha, const SparseVector& x);

/// Raw score w' g(x; alpha) + b.
double predict_latent(const LatentModel& model, const SparseVector& x);

}  // namespace dropsvm

#endif  // DROPSVM_LATENT_HPP
