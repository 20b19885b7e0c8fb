#ifndef DROPSVM_NOISE_HPP
#define DROPSVM_NOISE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dropsvm/sparse.hpp"

namespace dropsvm {

enum class NoiseKind { None, Dropout, Gaussian, Laplace, Poisson };

std::string to_string(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& name);

/// Unbiased per-feature corrupting distribution p(x~ | x).
///
/// The parameter is the dropout level q for Dropout, the variance for
/// Gaussian, the scale for Laplace; it is ignored for Poisson and None.
/// Instances are immutable and validated on construction.
class NoiseModel {
 public:
  NoiseModel() = default;
  NoiseModel(NoiseKind kind, double param);

  static NoiseModel none() { return {}; }
  static NoiseModel dropout(double q) { return {NoiseKind::Dropout, q}; }
  static NoiseModel gaussian(double variance) { return {NoiseKind::Gaussian, variance}; }
  static NoiseModel laplace(double scale) { return {NoiseKind::Laplace, scale}; }
  static NoiseModel poisson() { return {NoiseKind::Poisson, 0.0}; }

  NoiseKind kind() const { return kind_; }
  double param() const { return param_; }

  /// True when corruption leaves every input unchanged.
  bool is_deterministic() const;

  /// Variance added to every declared coordinate regardless of its value
  /// (Gaussian and Laplace); zero otherwise.
  double uniform_variance() const;

  /// Variance of a coordinate whose raw value is `x` under value-dependent
  /// noise (Dropout and Poisson); zero otherwise.
  double value_variance(double x) const;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;

 private:
  NoiseKind kind_ = NoiseKind::None;
  double param_ = 0.0;
};

/// First two moments of a corrupted example. The mean equals the raw
/// features; the diagonal variance is `var` on the support of `mean` plus
/// `uniform_var` on every declared coordinate.
struct CorruptionMoments {
  SparseVector mean;
  std::vector<double> var;  // aligned with mean.indices()
  double uniform_var = 0.0;
  std::size_t dim = 0;

  /// Full length-`dim` diagonal of V_p[x~].
  std::vector<double> dense_var() const;

  /// sum_d var_d * w_d^2 over the first `dim` coordinates of w.
  double weighted_variance(const Eigen::Ref<const Eigen::VectorXd>& w) const;
};

/// Mean and diagonal variance of the corrupted version of `x` in a space of
/// `dim` declared features. Throws DomainError for negative inputs under
/// Poisson noise or indices outside `dim`.
CorruptionMoments moments(const SparseVector& x, const NoiseModel& model,
                          std::size_t dim);

/// One draw x~ ~ p(x~ | x). Deterministic in `seed`.
SparseVector sample(const SparseVector& x, const NoiseModel& model,
                    std::uint64_t seed, std::size_t dim);

/// Mixes a base seed with a stream index into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace dropsvm

#endif  // DROPSVM_NOISE_HPP
