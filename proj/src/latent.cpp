#include "dropsvm/latent.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "bound.hpp"
#include "dropsvm/errors.hpp"

namespace dropsvm {

namespace {

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

// Coordinates of x~ that carry variance, with their variances.
void variance_rows(const SparseVector& x, const NoiseModel& noise, std::size_t dim,
                   std::vector<Index>& rows, std::vector<double>& var) {
  rows.clear();
  var.clear();
  const double uni = noise.uniform_variance();
  if (uni > 0.0) {
    rows.reserve(dim);
    var.reserve(dim);
    std::size_t k = 0;
    for (std::size_t d = 0; d < dim; ++d) {
      double v = uni;
      if (k < x.nnz() && x.index(k) == d) v += noise.value_variance(x.value(k++));
      rows.push_back(static_cast<Index>(d));
      var.push_back(v);
    }
    return;
  }
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    const double v = noise.value_variance(x.value(k));
    if (v > 0.0) {
      rows.push_back(x.index(k));
      var.push_back(v);
    }
  }
}

// Hidden pre-activations alpha' x for sparse x.
Eigen::VectorXd preactivation(const Eigen::MatrixXd& alpha, const SparseVector& x) {
  if (x.min_dim() > static_cast<std::size_t>(alpha.rows())) {
    throw DomainError("input has more features than the latent model");
  }
  Eigen::VectorXd a = Eigen::VectorXd::Zero(alpha.cols());
  for (std::size_t k = 0; k < x.nnz(); ++k) a += x.value(k) * alpha.row(x.index(k)).transpose();
  return a;
}

// Per-example quantities shared by the value, gradient and M-step.
struct HiddenState {
  Eigen::VectorXd g;       // g(x)
  Eigen::VectorXd eta;     // g (1 - g)
  std::vector<Index> rows;
  std::vector<double> var;
  Eigen::VectorXd h;       // h_r = sum_k w_k eta_k alpha(row_r, k)
  double s = 0.0;          // w'g + b
  double var_s = 0.0;      // sum_r var_r h_r^2
};

void fill_state(const LatentModel& m, const SparseVector& x, const NoiseModel& noise,
                HiddenState& st) {
  st.g = preactivation(m.alpha, x).unaryExpr([](double a) { return sigmoid(a); });
  st.eta = st.g.array() * (1.0 - st.g.array());
  variance_rows(x, noise, m.dim(), st.rows, st.var);
  const Eigen::VectorXd weta = m.w.cwiseProduct(st.eta);
  st.h.resize(static_cast<Eigen::Index>(st.rows.size()));
  st.var_s = 0.0;
  for (std::size_t r = 0; r < st.rows.size(); ++r) {
    const double hr = m.alpha.row(st.rows[r]).dot(weta);
    st.h[static_cast<Eigen::Index>(r)] = hr;
    st.var_s += st.var[r] * hr * hr;
  }
  st.s = m.w.dot(st.g) + m.b;
}

bool is_fixed(const TrainConfig& cfg) {
  return cfg.reweight_mode == ReweightMode::FixedQuadratic;
}

}  // namespace

Eigen::MatrixXd TaylorMoments::hidden_covariance() const {
  const Eigen::Index k = g_mu.size();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto row = jac.row(static_cast<Eigen::Index>(r));
    cov.noalias() += var[r] * row.transpose() * row;
  }
  return cov;
}

TaylorMoments taylor_moments(const SparseVector& x, const Eigen::MatrixXd& alpha,
                             const NoiseModel& noise) {
  TaylorMoments tm;
  tm.g_mu = hidden_features(alpha, x);
  const Eigen::VectorXd eta = tm.g_mu.array() * (1.0 - tm.g_mu.array());
  variance_rows(x, noise, static_cast<std::size_t>(alpha.rows()), tm.rows, tm.var);
  tm.jac.resize(static_cast<Eigen::Index>(tm.rows.size()), alpha.cols());
  for (std::size_t r = 0; r < tm.rows.size(); ++r) {
    tm.jac.row(static_cast<Eigen::Index>(r)) =
        alpha.row(tm.rows[r]).cwiseProduct(eta.transpose());
  }
  return tm;
}

PerExampleStats latent_second_moment(const Eigen::VectorXd& w, double b,
                                     const TaylorMoments& tm, double y, double ell, Loss loss) {
  if (w.size() != tm.g_mu.size()) throw DomainError("latent weights do not match hidden size");
  const double s = w.dot(tm.g_mu) + b;
  double var_s = 0.0;
  for (std::size_t r = 0; r < tm.rows.size(); ++r) {
    const double hr = tm.jac.row(static_cast<Eigen::Index>(r)).dot(w);
    var_s += tm.var[r] * hr * hr;
  }
  switch (loss) {
    case Loss::Hinge: {
      const double zm = ell - y * s;
      return {zm, zm * zm + var_s};
    }
    case Loss::Logistic:
      return {s, s * s + var_s};
    case Loss::EpsInsensitive:
      break;
  }
  throw ParameterError("latent models support hinge and logistic losses only");
}

LatentObjective::LatentObjective(const ExampleStream& data, const TrainConfig& cfg,
                                 double alpha_reg, Loss loss)
    : data_(data), cfg_(cfg), alpha_reg_(alpha_reg), loss_(loss) {
  if (loss == Loss::EpsInsensitive) {
    throw ParameterError("latent models support hinge and logistic losses only");
  }
  if (!(alpha_reg > 0.0)) throw ParameterError("alpha_reg must be positive");
}

std::vector<double> LatentObjective::e_step(const LatentModel& model) const {
  std::vector<double> gamma(data_.size());
  const bool fixed = is_fixed(cfg_);
  HiddenState st;
  data_.for_each([&](std::size_t i, const Example& ex) {
    const double cn = cfg_.c * ex.weight;
    if (fixed) {
      gamma[i] = loss_ == Loss::Hinge ? 1.0 / cn : 0.5 * cn;
      return;
    }
    fill_state(model, ex.x, cfg_.noise, st);
    if (loss_ == Loss::Hinge) {
      const double zm = cfg_.ell - ex.y * st.s;
      gamma[i] = gamma_hinge(cn, zm * zm + st.var_s);
    } else {
      gamma[i] = gamma_logistic(cn, st.s * st.s + st.var_s);
    }
  });
  return gamma;
}

double LatentObjective::value(const LatentModel& model, const std::vector<double>& gamma) const {
  return evaluate(model, gamma, nullptr, nullptr);
}

double LatentObjective::evaluate(const LatentModel& model, const std::vector<double>& gamma,
                                 Eigen::VectorXd* grad_wb, Eigen::MatrixXd* grad_alpha) const {
  if (gamma.size() != data_.size()) throw DomainError("re-weights do not match the dataset");
  const auto kdim = static_cast<Eigen::Index>(model.hidden());
  const bool fixed = is_fixed(cfg_);
  const double ell = fixed ? 0.0 : cfg_.ell;

  double total = model.w.squaredNorm() + alpha_reg_ * model.alpha.squaredNorm();
  if (grad_wb != nullptr) {
    grad_wb->setZero(kdim + 1);
    grad_wb->head(kdim) = 2.0 * model.w;
  }
  if (grad_alpha != nullptr) *grad_alpha = 2.0 * alpha_reg_ * model.alpha;

  HiddenState st;
  Eigen::VectorXd u(kdim), coef(kdim);
  data_.for_each([&](std::size_t i, const Example& ex) {
    const double cn = cfg_.c * ex.weight;
    fill_state(model, ex.x, cfg_.noise, st);
    const detail::BoundTerm t =
        loss_ == Loss::Hinge ? detail::hinge_bound(cn, ell, ex.y, st.s, st.var_s, gamma[i])
                             : detail::logistic_bound(cn, ex.y, st.s, st.var_s, gamma[i], fixed);
    total += t.value;
    if (!std::isfinite(t.value)) return;
    // dT/dh_r = 2 d_var var_r h_r
    if (grad_wb != nullptr) {
      auto gw = grad_wb->head(kdim);
      gw += t.d_mean * st.g;
      for (std::size_t r = 0; r < st.rows.size(); ++r) {
        const double th = 2.0 * t.d_var * st.var[r] * st.h[static_cast<Eigen::Index>(r)];
        gw += th * model.alpha.row(st.rows[r]).transpose().cwiseProduct(st.eta);
      }
      (*grad_wb)[kdim] += t.d_mean;
    }
    if (grad_alpha != nullptr) {
      // u_k = sum_r dT/dh_r alpha(row_r, k)
      u.setZero();
      for (std::size_t r = 0; r < st.rows.size(); ++r) {
        const double th = 2.0 * t.d_var * st.var[r] * st.h[static_cast<Eigen::Index>(r)];
        u += th * model.alpha.row(st.rows[r]).transpose();
      }
      const Eigen::VectorXd weta = model.w.cwiseProduct(st.eta);
      // through g_k and eta_k, both functions of alpha_k' x
      coef = weta.array() * (t.d_mean + (1.0 - 2.0 * st.g.array()) * u.array());
      for (std::size_t k = 0; k < ex.x.nnz(); ++k) {
        grad_alpha->row(ex.x.index(k)) += ex.x.value(k) * coef.transpose();
      }
      // through h_r's explicit dependence on alpha(row_r, :)
      for (std::size_t r = 0; r < st.rows.size(); ++r) {
        const double th = 2.0 * t.d_var * st.var[r] * st.h[static_cast<Eigen::Index>(r)];
        grad_alpha->row(st.rows[r]) += th * weta.transpose();
      }
    }
  });
  return total;
}

SmoothObjective LatentObjective::w_block(const LatentModel& model,
                                         const std::vector<double>& gamma) const {
  SmoothObjective obj;
  obj.dim = static_cast<Eigen::Index>(model.hidden()) + 1;
  obj.eval = [this, model, gamma](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    LatentModel m = model;
    const Eigen::Index k = x.size() - 1;
    m.w = x.head(k);
    m.b = x[k];
    return evaluate(m, gamma, &g, nullptr);
  };
  return obj;
}

SmoothObjective LatentObjective::alpha_block(const LatentModel& model,
                                             const std::vector<double>& gamma) const {
  SmoothObjective obj;
  obj.dim = model.alpha.size();
  obj.eval = [this, model, gamma](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    LatentModel m = model;
    m.alpha = Eigen::Map<const Eigen::MatrixXd>(x.data(), model.alpha.rows(), model.alpha.cols());
    Eigen::MatrixXd ga;
    const double f = evaluate(m, gamma, nullptr, &ga);
    g = Eigen::Map<const Eigen::VectorXd>(ga.data(), ga.size());
    return f;
  };
  return obj;
}

void LatentObjective::solve_w(LatentModel& model, const std::vector<double>& gamma) const {
  const auto kdim = static_cast<Eigen::Index>(model.hidden());
  if (model.hidden() + 1 > cfg_.dense_threshold) {
    Eigen::VectorXd x0(kdim + 1);
    x0 << model.w, model.b;
    const LbfgsResult res = minimize_lbfgs(w_block(model, gamma), x0, cfg_.lbfgs);
    model.w = res.x.head(kdim);
    model.b = res.x[kdim];
    return;
  }
  const bool fixed = is_fixed(cfg_);
  const double ell = fixed ? 0.0 : cfg_.ell;
  QuadraticProblem p;
  p.gram = Eigen::MatrixXd::Zero(kdim + 1, kdim + 1);
  p.rhs = Eigen::VectorXd::Zero(kdim + 1);
  p.ridge = 1.0;
  p.unpenalized = {kdim};
  HiddenState st;
  Eigen::VectorXd ga(kdim + 1), jr(kdim);
  data_.for_each([&](std::size_t i, const Example& ex) {
    const double cn = cfg_.c * ex.weight;
    const double g = gamma[i];
    double a, t;
    if (loss_ == Loss::Hinge) {
      a = 0.5 * cn * cn * g;
      t = (ell + 1.0 / (cn * g)) * ex.y;
    } else {
      a = 0.5 * g;
      t = cn / (2.0 * g) * ex.y;
    }
    fill_state(model, ex.x, cfg_.noise, st);
    ga << st.g, 1.0;
    p.gram.selfadjointView<Eigen::Lower>().rankUpdate(ga, a);
    for (std::size_t r = 0; r < st.rows.size(); ++r) {
      jr = model.alpha.row(st.rows[r]).transpose().cwiseProduct(st.eta);
      p.gram.topLeftCorner(kdim, kdim).selfadjointView<Eigen::Lower>().rankUpdate(
          jr, a * st.var[r]);
    }
    p.rhs += (a * t) * ga;
  });
  p.gram = p.gram.selfadjointView<Eigen::Lower>();
  const NormalSolution sol = solve_normal_equations(p);
  model.w = sol.w.head(kdim);
  model.b = sol.w[kdim];
}

LatentModel train_latent(const ExampleStream& data, Loss loss, const TrainConfig& cfg,
                         const LatentOptions& options, LatentTrace* trace) {
  cfg.validate(loss);
  if (options.hidden < 1) throw ParameterError("hidden size K must be positive");
  if (data.size() == 0) throw DataError("cannot train on an empty dataset");
  data.for_each([&](std::size_t i, const Example& ex) {
    if (ex.y != 1.0 && ex.y != -1.0) {
      throw DataError("classification labels must be +1 or -1 (example " + std::to_string(i) +
                      ")");
    }
    if (ex.x.min_dim() > data.dim()) throw DataError("feature index beyond dim");
    if (!(ex.weight > 0.0)) throw DataError("example weights must be positive");
    for (double v : ex.x.values()) {
      if (!std::isfinite(v)) throw DataError("non-finite feature value");
      if (cfg.noise.kind() == NoiseKind::Poisson && v < 0.0) {
        throw DomainError("Poisson noise requires nonnegative features");
      }
    }
  });

  const LatentObjective objective(data, cfg, options.alpha_reg, loss);
  const auto kdim = static_cast<Eigen::Index>(options.hidden);
  LatentModel model;
  model.loss = loss;
  model.noise = cfg.noise;
  model.alpha.resize(static_cast<Eigen::Index>(data.dim()), kdim);
  {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unif(-options.init_scale, options.init_scale);
    for (Eigen::Index k = 0; k < kdim; ++k) {
      for (Eigen::Index d = 0; d < model.alpha.rows(); ++d) {
        model.alpha(d, k) = options.init_scale > 0.0 ? unif(rng) : 0.0;
      }
    }
  }
  model.w = Eigen::VectorXd::Zero(kdim);
  model.b = 0.0;

  LatentTrace local;
  LatentTrace& tr = trace != nullptr ? *trace : local;
  tr = LatentTrace{};
  double step = 1.0;
  double previous = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd grad, trial;
  for (int it = 1; it <= cfg.max_irls_iters; ++it) {
    tr.gamma = objective.e_step(model);
    tr.objective.push_back(objective.value(model, tr.gamma));
    objective.solve_w(model, tr.gamma);
    double current = objective.value(model, tr.gamma);
    tr.objective.push_back(current);

    if (!options.freeze_alpha) {
      for (int s = 0; s < options.alpha_steps; ++s) {
        const double f0 = objective.evaluate(model, tr.gamma, nullptr, &grad);
        const double g2 = grad.squaredNorm();
        if (!(g2 > 0.0)) break;
        double t = std::min(2.0 * step, 1e6);
        bool accepted = false;
        LatentModel candidate = model;
        for (int bt = 0; bt < 60; ++bt) {
          candidate.alpha = model.alpha - t * grad;
          const double f1 = objective.value(candidate, tr.gamma);
          if (std::isfinite(f1) && f1 <= f0 - 1e-4 * t * g2) {
            accepted = true;
            break;
          }
          t *= 0.5;
        }
        if (!accepted) break;
        step = t;
        model.alpha = std::move(candidate.alpha);
      }
      current = objective.value(model, tr.gamma);
      tr.objective.push_back(current);
    }
    if (!std::isfinite(current)) throw NumericError("latent objective became non-finite");
    tr.iterations = it;
    if (std::isfinite(previous) &&
        std::abs(previous - current) <= cfg.irls_tol * std::max(std::abs(current), 1e-300)) {
      tr.converged = true;
      break;
    }
    previous = current;
  }
  return model;
}

Eigen::VectorXd hidden_features(const Eigen::MatrixXd& alpha, const SparseVector& x) {
  return preactivation(alpha, x).unaryExpr([](double a) { return sigmoid(a); });
}

double predict_latent(const LatentModel& model, const SparseVector& x) {
  return model.w.dot(hidden_features(model.alpha, x)) + model.b;
}

}  // namespace dropsvm
