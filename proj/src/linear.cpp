#include "dropsvm/linear.hpp"

#include <cmath>
#include <limits>
#include <tuple>

#include "bound.hpp"
#include "dropsvm/errors.hpp"

namespace dropsvm {

std::string to_string(Loss loss) {
  switch (loss) {
    case Loss::Hinge: return "hinge";
    case Loss::Logistic: return "logistic";
    case Loss::EpsInsensitive: return "svr";
  }
  return "hinge";
}

Loss parse_loss(const std::string& name) {
  if (name == "hinge" || name == "svm") return Loss::Hinge;
  if (name == "logistic" || name == "lr") return Loss::Logistic;
  if (name == "svr" || name == "eps-insensitive" || name == "epsilon-insensitive") {
    return Loss::EpsInsensitive;
  }
  throw ParameterError("unknown loss '" + name + "'");
}

void TrainConfig::validate(Loss loss) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("c must be positive");
  if (loss == Loss::Hinge && reweight_mode == ReweightMode::Adaptive && !(ell >= 1.0)) {
    throw ParameterError("hinge margin ell must be >= 1");
  }
  if (loss == Loss::EpsInsensitive && !(epsilon >= 0.0)) {
    throw ParameterError("epsilon must be nonnegative");
  }
  if (max_irls_iters < 1) throw ParameterError("max_irls_iters must be positive");
  if (!(irls_tol > 0.0)) throw ParameterError("irls_tol must be positive");
}

PerExampleStats score_moments(const Eigen::Ref<const Eigen::VectorXd>& w_aug,
                              const CorruptionMoments& m) {
  const auto dim = static_cast<Eigen::Index>(m.dim);
  if (w_aug.size() != dim + 1) throw DomainError("augmented weight length must be dim + 1");
  const double mean = m.mean.dot(w_aug.head(dim)) + w_aug[dim];
  return {mean, mean * mean + m.weighted_variance(w_aug.head(dim))};
}

PerExampleStats second_moment_hinge(const Eigen::Ref<const Eigen::VectorXd>& w_aug, double y,
                                    double ell, const CorruptionMoments& m) {
  const PerExampleStats s = score_moments(w_aug, m);
  const double var = s.zeta_sq - s.zeta_mean * s.zeta_mean;
  const double zm = ell - y * s.zeta_mean;
  return {zm, zm * zm + var};
}

std::pair<PerExampleStats, PerExampleStats> second_moments_svr(
    const Eigen::Ref<const Eigen::VectorXd>& w_aug, double y, double eps,
    const CorruptionMoments& m) {
  const PerExampleStats s = score_moments(w_aug, m);
  const double var = s.zeta_sq - s.zeta_mean * s.zeta_mean;
  const double delta = y - s.zeta_mean;
  const double lo = delta - eps;
  const double hi = delta + eps;
  return {{lo, lo * lo + var}, {hi, hi * hi + var}};
}

namespace {

// Mean and variance of the score w'x~ + b for one example.
struct ScoreStats {
  double mean;
  double var;
};

class ScoreEvaluator {
 public:
  ScoreEvaluator(const LinearModel& model, const NoiseModel& noise)
      : w_(model.w), b_(model.b), noise_(noise) {
    const double u = noise.uniform_variance();
    uniform_ = u == 0.0 ? 0.0 : u * w_.squaredNorm();
  }

  ScoreStats operator()(const SparseVector& x) const {
    double s = b_;
    double v = uniform_;
    const auto& idx = x.indices();
    const auto& val = x.values();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double wd = w_[idx[k]];
      s += val[k] * wd;
      v += noise_.value_variance(val[k]) * wd * wd;
    }
    return {s, v};
  }

 private:
  const Eigen::VectorXd& w_;
  double b_;
  const NoiseModel& noise_;
  double uniform_ = 0.0;
};

bool is_fixed(const TrainConfig& cfg) {
  return cfg.reweight_mode == ReweightMode::FixedQuadratic;
}

double effective_ell(const TrainConfig& cfg) { return is_fixed(cfg) ? 0.0 : cfg.ell; }

void check_stream(Loss loss, const ExampleStream& data, const TrainConfig& cfg) {
  cfg.validate(loss);
  if (data.size() == 0) throw DataError("cannot train on an empty dataset");
  const std::size_t dim = data.dim();
  data.for_each([&](std::size_t i, const Example& ex) {
    if (ex.x.min_dim() > dim) {
      throw DataError("example " + std::to_string(i) + " has a feature index beyond dim");
    }
    if (!std::isfinite(ex.y)) throw DataError("non-finite label at example " + std::to_string(i));
    if (!(ex.weight > 0.0) || !std::isfinite(ex.weight)) {
      throw DataError("example weights must be positive");
    }
    if (loss != Loss::EpsInsensitive && ex.y != 1.0 && ex.y != -1.0) {
      throw DataError("classification labels must be +1 or -1 (example " + std::to_string(i) +
                      ")");
    }
    for (double v : ex.x.values()) {
      if (!std::isfinite(v)) throw DataError("non-finite feature at example " + std::to_string(i));
      if (cfg.noise.kind() == NoiseKind::Poisson && v < 0.0) {
        throw DomainError("Poisson noise requires nonnegative features");
      }
    }
  });
}

// Per-example variational bound term; see variational_objective().
double bound_term(Loss loss, const TrainConfig& cfg, double cn, double y, const ScoreStats& s,
                  double gamma, double delta) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  switch (loss) {
    case Loss::Hinge:
      return detail::hinge_bound(cn, effective_ell(cfg), y, s.mean, s.var, gamma).value;
    case Loss::Logistic:
      return detail::logistic_bound(cn, y, s.mean, s.var, gamma, is_fixed(cfg)).value;
    case Loss::EpsInsensitive: {
      if (!(gamma > 0.0) || !(delta > 0.0)) return kInf;
      const double lo = y - s.mean - cfg.epsilon;
      const double hi = y - s.mean + cfg.epsilon;
      const double a = lo * lo + s.var;
      const double b = hi * hi + s.var;
      return 0.5 * cn * cn * (gamma * a + delta * b) + 0.5 / gamma + 0.5 / delta -
             2.0 * cn * cfg.epsilon;
    }
  }
  return kInf;
}

LinearModel m_step(Loss loss, const LinearModel& current, const ExampleStream& data,
                   const TrainConfig& cfg, const ReweightedTargets& rt, bool* fallback) {
  const std::size_t dim = data.dim();
  const auto n_aug = static_cast<Eigen::Index>(dim + 1);
  const auto off = static_cast<Eigen::Index>(dim);
  const double uvar = cfg.noise.uniform_variance();
  LinearModel next = current;
  next.loss = loss;
  next.noise = cfg.noise;

  if (dim + 1 <= cfg.dense_threshold) {
    QuadraticProblem p;
    p.gram = Eigen::MatrixXd::Zero(n_aug, n_aug);
    p.rhs = Eigen::VectorXd::Zero(n_aug);
    p.ridge = 1.0;
    p.unpenalized = {off};
    double uniform_total = 0.0;
    data.for_each([&](std::size_t i, const Example& ex) {
      const double a = rt.weight[i];
      const double at = a * rt.target[i];
      const auto& idx = ex.x.indices();
      const auto& val = ex.x.values();
      const std::size_t nnz = idx.size();
      for (std::size_t k = 0; k < nnz; ++k) {
        const Eigen::Index r = idx[k];
        const double av = a * val[k];
        for (std::size_t l = k; l < nnz; ++l) p.gram(r, idx[l]) += av * val[l];
        p.gram(r, r) += a * cfg.noise.value_variance(val[k]);
        p.gram(r, off) += av;
        p.rhs[r] += at * val[k];
      }
      p.gram(off, off) += a;
      p.rhs[off] += at;
      uniform_total += a;
    });
    if (uvar != 0.0) p.gram.diagonal().head(off).array() += uvar * uniform_total;
    p.gram = p.gram.selfadjointView<Eigen::Upper>();
    NormalSolution sol = solve_normal_equations(p);
    if (fallback != nullptr) *fallback = *fallback || sol.used_fallback;
    next.w = sol.w.head(off);
    next.b = sol.w[off];
    return next;
  }

  // High-dimensional path: the corruption variance contributes a fixed
  // diagonal, so only the residuals depend on the examples at each evaluation.
  Eigen::VectorXd var_diag = Eigen::VectorXd::Zero(off);
  double uniform_total = 0.0;
  data.for_each([&](std::size_t i, const Example& ex) {
    const double a = rt.weight[i];
    for (std::size_t k = 0; k < ex.x.nnz(); ++k) {
      var_diag[ex.x.index(k)] += a * cfg.noise.value_variance(ex.x.value(k));
    }
    uniform_total += a;
  });
  if (uvar != 0.0) var_diag.array() += uvar * uniform_total;

  SmoothObjective obj;
  obj.dim = n_aug;
  obj.eval = [&](const Eigen::VectorXd& wa, Eigen::VectorXd& g) {
    g.setZero();
    const auto w = wa.head(off);
    double f = w.squaredNorm() + var_diag.dot(w.cwiseProduct(w));
    g.head(off) = 2.0 * w + 2.0 * var_diag.cwiseProduct(w);
    data.for_each([&](std::size_t i, const Example& ex) {
      const double r = ex.x.dot(w) + wa[off] - rt.target[i];
      const double a = rt.weight[i];
      f += a * r * r;
      const double coef = 2.0 * a * r;
      for (std::size_t k = 0; k < ex.x.nnz(); ++k) g[ex.x.index(k)] += coef * ex.x.value(k);
      g[off] += coef;
    });
    return f;
  };
  Eigen::VectorXd x0(n_aug);
  x0 << current.w, current.b;
  LbfgsResult res = minimize_lbfgs(obj, x0, cfg.lbfgs);
  if (res.status == LbfgsStatus::LineSearchFailed) {
    warn("M-step line search stalled; keeping best iterate");
  }
  next.w = res.x.head(off);
  next.b = res.x[off];
  return next;
}

LinearModel train_impl(Loss loss, const ExampleStream& data, const TrainConfig& cfg,
                       TrainTrace* trace) {
  check_stream(loss, data, cfg);
  LinearModel model;
  model.w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(data.dim()));
  model.b = 0.0;
  model.loss = loss;
  model.noise = cfg.noise;

  TrainTrace local;
  TrainTrace& tr = trace != nullptr ? *trace : local;
  tr = TrainTrace{};

  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= cfg.max_irls_iters; ++it) {
    tr.reweights = e_step(model, data, cfg);
    tr.objective.push_back(variational_objective(model, data, cfg, tr.reweights));
    const ReweightedTargets rt = reweighted_targets(loss, data, cfg, tr.reweights);
    model = m_step(loss, model, data, cfg, rt, &tr.solver_fallback);
    const double current = variational_objective(model, data, cfg, tr.reweights);
    if (!std::isfinite(current)) throw NumericError("variational objective became non-finite");
    tr.objective.push_back(current);
    tr.iterations = it;
    if (is_fixed(cfg)) {
      tr.converged = true;
      break;
    }
    if (std::isfinite(previous) &&
        std::abs(previous - current) <= cfg.irls_tol * std::max(std::abs(current), 1e-300)) {
      tr.converged = true;
      break;
    }
    previous = current;
  }
  return model;
}

}  // namespace

Reweights e_step(const LinearModel& model, const ExampleStream& data, const TrainConfig& cfg) {
  const Loss loss = model.loss;
  Reweights rw;
  rw.gamma.resize(data.size());
  if (loss == Loss::EpsInsensitive) rw.delta.resize(data.size());
  const ScoreEvaluator score(model, cfg.noise);
  const bool fixed = is_fixed(cfg);
  const double ell = effective_ell(cfg);
  data.for_each([&](std::size_t i, const Example& ex) {
    const double cn = cfg.c * ex.weight;
    switch (loss) {
      case Loss::Hinge: {
        if (fixed) {
          rw.gamma[i] = 1.0 / cn;
          break;
        }
        const ScoreStats s = score(ex.x);
        const double zm = ell - ex.y * s.mean;
        rw.gamma[i] = gamma_hinge(cn, zm * zm + s.var);
        break;
      }
      case Loss::Logistic: {
        if (fixed) {
          rw.gamma[i] = 0.5 * cn;
          break;
        }
        const ScoreStats s = score(ex.x);
        rw.gamma[i] = gamma_logistic(cn, s.mean * s.mean + s.var);
        break;
      }
      case Loss::EpsInsensitive: {
        if (fixed) {
          rw.gamma[i] = rw.delta[i] = 1.0 / cn;
          break;
        }
        const ScoreStats s = score(ex.x);
        const double lo = ex.y - s.mean - cfg.epsilon;
        const double hi = ex.y - s.mean + cfg.epsilon;
        std::tie(rw.gamma[i], rw.delta[i]) =
            gamma_delta_svr(cn, lo * lo + s.var, hi * hi + s.var);
        break;
      }
    }
  });
  return rw;
}

double variational_objective(const LinearModel& model, const ExampleStream& data,
                             const TrainConfig& cfg, const Reweights& reweights) {
  if (reweights.gamma.size() != data.size() ||
      (model.loss == Loss::EpsInsensitive && reweights.delta.size() != data.size())) {
    throw DomainError("re-weights do not match the dataset size");
  }
  const ScoreEvaluator score(model, cfg.noise);
  double total = model.w.squaredNorm();
  data.for_each([&](std::size_t i, const Example& ex) {
    const double delta = reweights.delta.empty() ? 0.0 : reweights.delta[i];
    total += bound_term(model.loss, cfg, cfg.c * ex.weight, ex.y, score(ex.x),
                        reweights.gamma[i], delta);
  });
  return total;
}

ReweightedTargets reweighted_targets(Loss loss, const ExampleStream& data,
                                     const TrainConfig& cfg, const Reweights& reweights) {
  ReweightedTargets rt;
  rt.weight.resize(data.size());
  rt.target.resize(data.size());
  const double ell = effective_ell(cfg);
  data.for_each([&](std::size_t i, const Example& ex) {
    const double cn = cfg.c * ex.weight;
    const double g = reweights.gamma[i];
    switch (loss) {
      case Loss::Hinge:
        rt.weight[i] = 0.5 * cn * cn * g;
        rt.target[i] = (ell + 1.0 / (cn * g)) * ex.y;
        break;
      case Loss::Logistic:
        rt.weight[i] = 0.5 * g;
        rt.target[i] = cn / (2.0 * g) * ex.y;
        break;
      case Loss::EpsInsensitive: {
        const double d = reweights.delta[i];
        rt.weight[i] = 0.5 * cn * cn * (g + d);
        rt.target[i] = ex.y + (d - g) / (d + g) * cfg.epsilon;
        break;
      }
    }
  });
  return rt;
}

double reweighted_quadratic_loss(const LinearModel& model, const ExampleStream& data,
                                 const NoiseModel& noise, const ReweightedTargets& targets) {
  const ScoreEvaluator score(model, noise);
  double total = model.w.squaredNorm();
  data.for_each([&](std::size_t i, const Example& ex) {
    const ScoreStats s = score(ex.x);
    const double r = s.mean - targets.target[i];
    total += targets.weight[i] * (r * r + s.var);
  });
  return total;
}

LinearModel train_hinge(const ExampleStream& data, const TrainConfig& cfg, TrainTrace* trace) {
  return train_impl(Loss::Hinge, data, cfg, trace);
}

LinearModel train_logistic(const ExampleStream& data, const TrainConfig& cfg,
                           TrainTrace* trace) {
  return train_impl(Loss::Logistic, data, cfg, trace);
}

LinearModel train_svr(const ExampleStream& data, const TrainConfig& cfg, TrainTrace* trace) {
  return train_impl(Loss::EpsInsensitive, data, cfg, trace);
}

LinearModel train_linear(Loss loss, const ExampleStream& data, const TrainConfig& cfg,
                         TrainTrace* trace) {
  return train_impl(loss, data, cfg, trace);
}

double predict(const LinearModel& model, const SparseVector& x) {
  if (x.min_dim() > model.dim()) throw DomainError("input has more features than the model");
  return x.dot(model.w) + model.b;
}

}  // namespace dropsvm
