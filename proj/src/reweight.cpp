#include "dropsvm/reweight.hpp"

#include <algorithm>
#include <cmath>

#include "dropsvm/errors.hpp"

namespace dropsvm {

namespace {

void check_c(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("c must be positive and finite");
}

// tanh(u)/u with its series near zero
double tanh_ratio(double u) {
  if (std::abs(u) < 1e-4) {
    const double u2 = u * u;
    return 1.0 - u2 / 3.0 + 2.0 * u2 * u2 / 15.0;
  }
  return std::tanh(u) / u;
}

}  // namespace

double gamma_hinge(double c, double second_moment) {
  check_c(c);
  return 1.0 / (c * std::sqrt(std::max(second_moment, kMomentFloor)));
}

double gamma_logistic(double c, double second_moment) {
  check_c(c);
  const double z = std::sqrt(std::max(second_moment, 0.0));
  // (c / 2z) tanh(z/2) = (c/4) * tanh(z/2) / (z/2)
  return 0.25 * c * tanh_ratio(0.5 * z);
}

std::pair<double, double> gamma_delta_svr(double c, double m_minus, double m_plus) {
  return {gamma_hinge(c, m_minus), gamma_hinge(c, m_plus)};
}

double logistic_anchor(double c, double gamma) {
  check_c(c);
  const double r = 4.0 * gamma / c;  // tanh(u)/u = r, u = z/2
  if (!(r > 0.0) || r > 1.0 + 1e-15) {
    throw DomainError("logistic re-weight outside (0, c/4]");
  }
  if (r >= 1.0) return 0.0;
  // tanh(u)/u is decreasing on [0, inf); bracket then bisect
  double lo = 0.0;
  double hi = 1.0 / r + 1.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (tanh_ratio(mid) > r) lo = mid; else hi = mid;
  }
  return lo + hi;  // z = 2u with u = (lo + hi) / 2
}

double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

}  // namespace dropsvm
