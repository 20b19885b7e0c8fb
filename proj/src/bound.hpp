#ifndef DROPSVM_SRC_BOUND_HPP
#define DROPSVM_SRC_BOUND_HPP

#include <cmath>
#include <limits>

#include "dropsvm/reweight.hpp"

namespace dropsvm::detail {

// One example's contribution to the variational bound as a function of the
// score mean s and score variance v, at a fixed re-weight gamma.
struct BoundTerm {
  double value;
  double d_mean;  // d value / d s
  double d_var;   // d value / d v
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// (c^2/2) gamma E[zeta^2] + 1/(2 gamma) + c E[zeta], zeta = ell - y (score).
inline BoundTerm hinge_bound(double c, double ell, double y, double s, double v, double gamma) {
  if (!(gamma > 0.0)) return {kInfinity, 0.0, 0.0};
  const double zm = ell - y * s;
  const double a = c * c * gamma;
  return {0.5 * a * (zm * zm + v) + 0.5 / gamma + c * zm, a * (s - ell * y) - c * y, 0.5 * a};
}

// (1/2) gamma E[omega^2] - (c/2) y E[omega] plus the Polya-Gamma entropy
// terms, omega = score. In fixed-quadratic mode the entropy terms are
// replaced by the constant that makes the term (c/4) E[(omega - y)^2].
inline BoundTerm logistic_bound(double c, double y, double s, double v, double gamma,
                                bool fixed) {
  const double w2 = s * s + v;
  const double d_mean = gamma * s - 0.5 * c * y;
  if (fixed) return {0.5 * gamma * w2 - 0.5 * c * y * s + 0.25 * c, d_mean, 0.5 * gamma};
  if (!(gamma > 0.0) || gamma > 0.25 * c * (1.0 + 1e-15)) return {kInfinity, 0.0, 0.0};
  const double t = logistic_anchor(c, gamma);
  const double value = 0.5 * gamma * w2 + c * log_cosh(0.5 * t) - 0.5 * gamma * t * t -
                       0.5 * c * y * s + c * std::log(2.0);
  return {value, d_mean, 0.5 * gamma};
}

}  // namespace dropsvm::detail

#endif  // DROPSVM_SRC_BOUND_HPP
