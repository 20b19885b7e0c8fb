#ifndef DROPSVM_REWEIGHT_HPP
#define DROPSVM_REWEIGHT_HPP

#include <utility>
#include <vector>

namespace dropsvm {

/// Second moments below this floor are clamped before taking square roots,
/// which caps the hinge and epsilon-insensitive re-weights at
/// 1 / (c * sqrt(kMomentFloor)).
inline constexpr double kMomentFloor = 1e-12;

/// Per-example expectations of the augmented variables produced by an
/// E-step. `gamma` is E[1/lambda] for hinge/SVR and E[lambda] for logistic;
/// `delta` is E[1/omega] and is only filled for SVR.
struct Reweights {
  std::vector<double> gamma;
  std::vector<double> delta;
};

/// Mean of 1/lambda under GIG(1/2, 1, c^2 m): 1 / (c sqrt(m)).
double gamma_hinge(double c, double second_moment);

/// Mean of lambda under PG(c, sqrt(m)): (c / 2z) tanh(z / 2), z = sqrt(m),
/// with the limit c/4 at z = 0.
double gamma_logistic(double c, double second_moment);

/// Pair (gamma, delta) for the two sides of the epsilon tube, computed from
/// E[(Delta - eps)^2] and E[(Delta + eps)^2].
std::pair<double, double> gamma_delta_svr(double c, double m_minus, double m_plus);

/// Inverse of gamma_logistic in z: the z >= 0 with gamma_logistic(c, z^2) =
/// gamma. Requires 0 < gamma <= c/4.
double logistic_anchor(double c, double gamma);

/// log cosh(u), stable for large |u|.
double log_cosh(double u);

}  // namespace dropsvm

#endif  // DROPSVM_REWEIGHT_HPP
