#ifndef DROPSVM_LINEAR_HPP
#define DROPSVM_LINEAR_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dropsvm/dataset.hpp"
#include "dropsvm/noise.hpp"
#include "dropsvm/reweight.hpp"
#include "dropsvm/solver.hpp"

namespace dropsvm {

enum class Loss { Hinge, Logistic, EpsInsensitive };

std::string to_string(Loss loss);
Loss parse_loss(const std::string& name);

enum class ReweightMode {
  Adaptive,        // closed-form E-step every iteration
  FixedQuadratic,  // gamma held at the value that turns the loss quadratic
};

struct TrainConfig {
  double c = 1.0;        // loss trade-off
  double ell = 1.0;      // hinge margin, >= 1
  double epsilon = 0.1;  // SVR tube half-width
  NoiseModel noise;
  int max_irls_iters = 100;
  double irls_tol = 1e-5;  // relative change of the variational objective
  ReweightMode reweight_mode = ReweightMode::Adaptive;
  LbfgsOptions lbfgs;
  std::size_t dense_threshold = kDenseThreshold;

  /// Throws ParameterError when a field is out of range for `loss`.
  void validate(Loss loss) const;
};

/// Linear predictor f(x) = w'x + b. The offset is never regularized.
struct LinearModel {
  Eigen::VectorXd w;
  double b = 0.0;
  Loss loss = Loss::Hinge;
  NoiseModel noise;  // corruption the model was trained under

  std::size_t dim() const { return static_cast<std::size_t>(w.size()); }
};

/// Moments of one example's corrupted linear form. `zeta_mean` is E[zeta],
/// E[omega] or E[Delta -/+ eps] depending on the engine.
struct PerExampleStats {
  double zeta_mean = 0.0;
  double zeta_sq = 0.0;
};

/// E[s] and E[s^2] for the score s = w'x~ + b, where `w_aug` holds w followed
/// by b and `m` describes the corrupted input.
PerExampleStats score_moments(const Eigen::Ref<const Eigen::VectorXd>& w_aug,
                              const CorruptionMoments& m);

/// Moments of zeta = ell - y (w'x~ + b).
PerExampleStats second_moment_hinge(const Eigen::Ref<const Eigen::VectorXd>& w_aug, double y,
                                    double ell, const CorruptionMoments& m);

/// Moments of Delta - eps and Delta + eps, Delta = y - (w'x~ + b).
std::pair<PerExampleStats, PerExampleStats> second_moments_svr(
    const Eigen::Ref<const Eigen::VectorXd>& w_aug, double y, double eps,
    const CorruptionMoments& m);

/// Diagnostics filled by the trainers on request.
struct TrainTrace {
  /// Variational objective after every E-step and every M-step, in order.
  std::vector<double> objective;
  int iterations = 0;
  bool converged = false;
  bool solver_fallback = false;
  Reweights reweights;  // from the last E-step
};

LinearModel train_hinge(const ExampleStream& data, const TrainConfig& cfg,
                        TrainTrace* trace = nullptr);
LinearModel train_logistic(const ExampleStream& data, const TrainConfig& cfg,
                           TrainTrace* trace = nullptr);
LinearModel train_svr(const ExampleStream& data, const TrainConfig& cfg,
                      TrainTrace* trace = nullptr);

/// Dispatches on `loss`.
LinearModel train_linear(Loss loss, const ExampleStream& data, const TrainConfig& cfg,
                         TrainTrace* trace = nullptr);

/// Closed-form E-step for `model` on `data`; FixedQuadratic mode returns the
/// fixed re-weights.
Reweights e_step(const LinearModel& model, const ExampleStream& data, const TrainConfig& cfg);

/// Upper bound on ||w||^2 + (scaled) expected loss at the given re-weights,
/// up to constants independent of (w, reweights). Equals the regularized
/// expected loss itself when the re-weights come from e_step and there is no
/// corruption. Returns +inf for re-weights outside their feasible range.
double variational_objective(const LinearModel& model, const ExampleStream& data,
                             const TrainConfig& cfg, const Reweights& reweights);

/// The M-step as a re-weighted least squares problem:
/// minimize ||w||^2 + sum_n weight_n E_p[(w'x~_n + b - target_n)^2].
struct ReweightedTargets {
  std::vector<double> weight;
  std::vector<double> target;
};

ReweightedTargets reweighted_targets(Loss loss, const ExampleStream& data,
                                     const TrainConfig& cfg, const Reweights& reweights);

/// ||w||^2 + sum_n weight_n E_p[(w'x~_n + b - target_n)^2], evaluated
/// analytically from the corruption moments.
double reweighted_quadratic_loss(const LinearModel& model, const ExampleStream& data,
                                 const NoiseModel& noise, const ReweightedTargets& targets);

/// Raw score w'x + b.
double predict(const LinearModel& model, const SparseVector& x);

}  // namespace dropsvm

#endif  // DROPSVM_LINEAR_HPP
