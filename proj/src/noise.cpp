#include "dropsvm/noise.hpp"

#include <cmath>
#include <random>

#include "dropsvm/errors.hpp"

namespace dropsvm {

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::Dropout: return "dropout";
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::Laplace: return "laplace";
    case NoiseKind::Poisson: return "poisson";
  }
  return "none";
}

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "none") return NoiseKind::None;
  if (name == "dropout" || name == "blankout") return NoiseKind::Dropout;
  if (name == "gaussian") return NoiseKind::Gaussian;
  if (name == "laplace") return NoiseKind::Laplace;
  if (name == "poisson") return NoiseKind::Poisson;
  throw ParameterError("unknown noise kind '" + name + "'");
}

NoiseModel::NoiseModel(NoiseKind kind, double param) : kind_(kind), param_(param) {
  if (!std::isfinite(param)) throw ParameterError("noise parameter must be finite");
  switch (kind) {
    case NoiseKind::Dropout:
      if (param < 0.0 || param >= 1.0) {
        throw ParameterError("dropout level q must lie in [0, 1), got " +
                             std::to_string(param));
      }
      break;
    case NoiseKind::Gaussian:
    case NoiseKind::Laplace:
      if (param < 0.0) throw ParameterError("noise scale must be nonnegative");
      break;
    case NoiseKind::None:
    case NoiseKind::Poisson:
      param_ = 0.0;
      break;
  }
}

bool NoiseModel::is_deterministic() const {
  return kind_ == NoiseKind::None ||
         (kind_ != NoiseKind::Poisson && param_ == 0.0);
}

double NoiseModel::uniform_variance() const {
  switch (kind_) {
    case NoiseKind::Gaussian: return param_;
    case NoiseKind::Laplace: return 2.0 * param_ * param_;
    default: return 0.0;
  }
}

double NoiseModel::value_variance(double x) const {
  switch (kind_) {
    case NoiseKind::Dropout: return param_ / (1.0 - param_) * x * x;
    case NoiseKind::Poisson: return x;
    default: return 0.0;
  }
}

std::vector<double> CorruptionMoments::dense_var() const {
  std::vector<double> out(dim, uniform_var);
  for (std::size_t k = 0; k < mean.nnz(); ++k) out[mean.index(k)] += var[k];
  return out;
}

double CorruptionMoments::weighted_variance(const Eigen::Ref<const Eigen::VectorXd>& w) const {
  double s = 0.0;
  for (std::size_t k = 0; k < mean.nnz(); ++k) {
    const double wd = w[mean.index(k)];
    s += var[k] * wd * wd;
  }
  if (uniform_var != 0.0) s += uniform_var * w.head(static_cast<Eigen::Index>(dim)).squaredNorm();
  return s;
}

namespace {

void check_input(const SparseVector& x, const NoiseModel& model, std::size_t dim) {
  if (x.min_dim() > dim) throw DomainError("feature index exceeds declared dimension");
  for (double v : x.values()) {
    if (!std::isfinite(v)) throw DomainError("non-finite feature value");
    if (model.kind() == NoiseKind::Poisson && v < 0.0) {
      throw DomainError("Poisson noise requires nonnegative features");
    }
  }
}

}  // namespace

CorruptionMoments moments(const SparseVector& x, const NoiseModel& model, std::size_t dim) {
  check_input(x, model, dim);
  CorruptionMoments m;
  m.mean = x;
  m.dim = dim;
  m.uniform_var = model.uniform_variance();
  m.var.resize(x.nnz());
  for (std::size_t k = 0; k < x.nnz(); ++k) m.var[k] = model.value_variance(x.value(k));
  return m;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finalizer over a combined state
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SparseVector sample(const SparseVector& x, const NoiseModel& model, std::uint64_t seed,
                    std::size_t dim) {
  check_input(x, model, dim);
  if (model.is_deterministic()) return x;

  std::mt19937_64 rng(seed);
  SparseVector out;
  switch (model.kind()) {
    case NoiseKind::Dropout: {
      std::bernoulli_distribution drop(model.param());
      const double scale = 1.0 / (1.0 - model.param());
      for (std::size_t k = 0; k < x.nnz(); ++k) {
        if (!drop(rng)) out.push_back(x.index(k), x.value(k) * scale);
      }
      return out;
    }
    case NoiseKind::Poisson: {
      for (std::size_t k = 0; k < x.nnz(); ++k) {
        if (x.value(k) == 0.0) continue;
        std::poisson_distribution<long long> draw(x.value(k));
        const auto v = static_cast<double>(draw(rng));
        if (v != 0.0) out.push_back(x.index(k), v);
      }
      return out;
    }
    case NoiseKind::Gaussian:
    case NoiseKind::Laplace: {
      std::normal_distribution<double> normal(0.0, std::sqrt(model.param()));
      std::exponential_distribution<double> expo(1.0);
      std::size_t k = 0;
      for (std::size_t d = 0; d < dim; ++d) {
        double v = 0.0;
        if (k < x.nnz() && x.index(k) == d) v = x.value(k++);
        double eps;
        if (model.kind() == NoiseKind::Gaussian) {
          eps = normal(rng);
        } else {
          // difference of two exponentials is Laplace(0, scale)
          eps = model.param() * (expo(rng) - expo(rng));
        }
        v += eps;
        if (v != 0.0) out.push_back(static_cast<Index>(d), v);
      }
      return out;
    }
    case NoiseKind::None:
      break;
  }
  return x;
}

}  // namespace dropsvm
