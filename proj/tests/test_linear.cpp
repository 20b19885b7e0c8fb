#include <doctest.h>

#include <cmath>
#include <random>

#include "dropsvm/errors.hpp"
#include "dropsvm/linear.hpp"
#include "oracles/oracles.hpp"
#include "support/synthetic.hpp"

using namespace dropsvm;

namespace {

Eigen::VectorXd augmented(const LinearModel& m) {
  Eigen::VectorXd wa(m.w.size() + 1);
  wa << m.w, m.b;
  return wa;
}

double training_error(const LinearModel& m, const Dataset& d) {
  int wrong = 0;
  for (const auto& ex : d.examples) wrong += (predict(m, ex.x) >= 0 ? 1.0 : -1.0) != ex.y;
  return static_cast<double>(wrong) / static_cast<double>(d.size());
}

oracle::Corruption to_oracle(NoiseKind k) {
  switch (k) {
    case NoiseKind::Gaussian: return oracle::Corruption::Gaussian;
    case NoiseKind::Laplace: return oracle::Corruption::Laplace;
    case NoiseKind::Poisson: return oracle::Corruption::Poisson;
    default: return oracle::Corruption::Dropout;
  }
}

Dataset separable4() {
  Eigen::MatrixXd x(4, 2);
  x << 2, 1, 1, 2, -1, -2, -2, -1;
  Eigen::VectorXd y(4);
  y << 1, 1, -1, -1;
  return synth::from_dense(x, y, TaskKind::Binary);
}

}  // namespace

TEST_CASE("hinge second moment examples") {
  const SparseVector x{{0, 2.0}, {1, 3.0}};
  Eigen::VectorXd wa(3);
  wa << 1, 0, 0;
  const auto m = moments(x, NoiseModel::dropout(0.5), 2);
  const PerExampleStats s = second_moment_hinge(wa, 1.0, 1.0, m);
  CHECK(s.zeta_mean == doctest::Approx(-1.0));
  CHECK(s.zeta_sq == doctest::Approx(5.0));

  // Monte Carlo over dropout masks.
  std::mt19937_64 rng(1);
  double acc = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd xt = oracle::corrupt(x.to_dense(2), oracle::Corruption::Dropout, 0.5, rng);
    const double zeta = 1.0 - (wa.head(2).dot(xt) + wa[2]);
    acc += zeta * zeta;
  }
  CHECK(std::abs(acc / n - 5.0) < 0.05);

  const auto m0 = moments(x, NoiseModel::dropout(0.0), 2);
  Eigen::VectorXd w2(3);
  w2 << 0.3, -0.7, 0.2;
  const PerExampleStats s0 = second_moment_hinge(w2, -1.0, 1.5, m0);
  CHECK(s0.zeta_sq == doctest::Approx(s0.zeta_mean * s0.zeta_mean).epsilon(1e-15));

  const PerExampleStats sz = second_moment_hinge(Eigen::VectorXd::Zero(3), 1.0, 2.0, m);
  CHECK(sz.zeta_mean == 2.0);
  CHECK(sz.zeta_sq == 4.0);

  CHECK_THROWS_AS(second_moment_hinge(Eigen::VectorXd::Zero(5), 1.0, 1.0, m), DomainError);
}

TEST_CASE("second moments dominate squared means") {
  const Dataset d = synth::random_sparse(30, 8, 0.5, 4);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0, 1);
  Eigen::VectorXd wa(9);
  for (auto& v : wa) v = normal(rng);
  for (const auto& ex : d.examples) {
    const auto m = moments(ex.x, NoiseModel::dropout(0.3), 8);
    const PerExampleStats h = second_moment_hinge(wa, ex.y, 1.0, m);
    CHECK(h.zeta_sq >= h.zeta_mean * h.zeta_mean - 1e-10);
    const auto [lo, hi] = second_moments_svr(wa, ex.y, 0.2, m);
    CHECK(lo.zeta_sq >= lo.zeta_mean * lo.zeta_mean - 1e-10);
    CHECK(hi.zeta_sq >= hi.zeta_mean * hi.zeta_mean - 1e-10);
  }
}

TEST_CASE("predict") {
  LinearModel m;
  m.w = Eigen::Vector2d(1, -1);
  m.b = 0.5;
  CHECK(predict(m, SparseVector{{0, 2.0}, {1, 1.0}}) == 1.5);
  CHECK(predict(m, SparseVector{}) == 0.5);
  CHECK_THROWS_AS(predict(m, SparseVector{{5, 1.0}}), DomainError);
}

TEST_CASE("hinge at q = 0 separates a separable set and agrees with an SVM oracle") {
  const Dataset d = separable4();
  TrainConfig cfg;
  cfg.c = 1.0;
  const LinearModel m = train_hinge(d, cfg);
  CHECK(training_error(m, d) == 0.0);
  const auto sub = oracle::subgradient_svm(synth::to_dense(d), synth::labels(d), 1.0, 1.0, 20000);
  for (const auto& ex : d.examples) {
    const double oracle_score = ex.x.dot(sub.w) + sub.b;
    CHECK((predict(m, ex.x) >= 0) == (oracle_score >= 0));
  }
}

TEST_CASE("symmetric data gives zero offset") {
  Eigen::MatrixXd x(6, 3);
  x << 1, 2, 0.5, 0.3, -1, 2, 2, 0.1, -0.4, -1, -2, -0.5, -0.3, 1, -2, -2, -0.1, 0.4;
  Eigen::VectorXd y(6);
  y << 1, 1, -1, -1, -1, 1;
  const Dataset d = synth::from_dense(x, y, TaskKind::Binary);
  for (Loss loss : {Loss::Hinge, Loss::Logistic}) {
    TrainConfig cfg;
    cfg.noise = NoiseModel::dropout(0.3);
    const LinearModel m = train_linear(loss, d, cfg);
    CHECK(std::abs(m.b) < 1e-8);
  }
}

TEST_CASE("fixed-quadratic modes are closed-form expected ridge solves") {
  const Dataset cls = synth::random_sparse(25, 6, 0.6, 9, true);
  synth::Split reg = synth::linear_regression(25, 1, 6, 0.2, 0.0, 0.0, 4);
  const NoiseModel noises[] = {NoiseModel::none(), NoiseModel::dropout(0.4),
                               NoiseModel::gaussian(0.3), NoiseModel::laplace(0.2),
                               NoiseModel::poisson()};
  for (const NoiseModel& noise : noises) {
    for (Loss loss : {Loss::Hinge, Loss::Logistic, Loss::EpsInsensitive}) {
      CAPTURE(to_string(loss));
      CAPTURE(to_string(noise.kind()));
      const bool svr = loss == Loss::EpsInsensitive;
      if (svr && noise.kind() == NoiseKind::Poisson) continue;  // regression features are signed
      const Dataset& d = svr ? reg.train : cls;
      TrainConfig cfg;
      cfg.c = 1.7;
      cfg.epsilon = 0.0;
      cfg.noise = noise;
      cfg.reweight_mode = ReweightMode::FixedQuadratic;
      const LinearModel m = train_linear(loss, d, cfg);

      const Eigen::MatrixXd x = synth::to_dense(d);
      const Eigen::VectorXd y = synth::labels(d);
      // Fixed weights: hinge gamma = 1/c gives c/2, logistic gamma = c/2
      // gives c/4, SVR gamma = delta = 1/c gives c. Targets are the labels.
      const double a = loss == Loss::Hinge ? cfg.c / 2 : loss == Loss::Logistic ? cfg.c / 4 : cfg.c;
      Eigen::MatrixXd var = Eigen::MatrixXd::Zero(x.rows(), x.cols());
      if (noise.kind() != NoiseKind::None) {
        var = oracle::corruption_variance(x, to_oracle(noise.kind()), noise.param());
      }
      const auto fit = oracle::expected_ridge_qr(x, y, Eigen::VectorXd::Constant(x.rows(), a), var);
      Eigen::VectorXd want(x.cols() + 1), got(x.cols() + 1);
      want << fit.w, fit.b;
      got << m.w, m.b;
      CHECK((got - want).norm() <= 1e-8 * std::max(1.0, want.norm()));
    }
  }
}

TEST_CASE("logistic first E-step is c/4") {
  const Dataset d = synth::random_sparse(10, 4, 0.5, 1);
  TrainConfig cfg;
  cfg.c = 3.0;
  cfg.noise = NoiseModel::dropout(0.5);
  LinearModel zero;
  zero.w = Eigen::VectorXd::Zero(4);
  zero.loss = Loss::Logistic;
  const Reweights rw = e_step(zero, d, cfg);
  for (double g : rw.gamma) CHECK(g == 0.75);
}

TEST_CASE("logistic at q = 0 matches a gradient-descent oracle") {
  const Dataset d = synth::binary_blobs(60, 3, 1.5, 8);
  TrainConfig cfg;
  cfg.c = 2.0;
  cfg.irls_tol = 1e-12;
  cfg.max_irls_iters = 500;
  const LinearModel m = train_logistic(d, cfg);
  const auto gd = oracle::gradient_logistic(synth::to_dense(d), synth::labels(d), 2.0, 20000);
  const Dataset test = synth::binary_blobs(200, 3, 1.5, 81);
  for (const auto& ex : test.examples) {
    const double s = ex.x.dot(gd.w) + gd.b;
    if (std::abs(s) > 1e-3) CHECK((predict(m, ex.x) >= 0) == (s >= 0));
  }
}

TEST_CASE("SVR with epsilon = 0 keeps the two re-weights equal") {
  const synth::Split s = synth::linear_regression(30, 1, 3, 0.3, 0.0, 0.0, 2);
  TrainConfig cfg;
  cfg.epsilon = 0.0;
  cfg.noise = NoiseModel::dropout(0.2);
  cfg.max_irls_iters = 5;
  TrainTrace trace;
  const LinearModel m = train_svr(s.train, cfg, &trace);
  for (std::size_t i = 0; i < trace.reweights.gamma.size(); ++i) {
    CHECK(trace.reweights.gamma[i] == trace.reweights.delta[i]);
  }
  const ReweightedTargets rt = reweighted_targets(Loss::EpsInsensitive, s.train, cfg, trace.reweights);
  for (std::size_t i = 0; i < s.train.size(); ++i) CHECK(rt.target[i] == s.train.examples[i].y);
  (void)m;
}

TEST_CASE("SVR recovers a noiseless slope for large c") {
  Eigen::MatrixXd x(20, 1);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    x(i, 0) = -1 + 0.1 * i;
    y[i] = 2 * x(i, 0);
  }
  const Dataset d = synth::from_dense(x, y, TaskKind::Regression);
  TrainConfig cfg;
  cfg.c = 100.0;
  cfg.epsilon = 0.01;
  const LinearModel m = train_svr(d, cfg);
  CHECK(std::abs(m.w[0] - 2.0) < 0.1);
}

TEST_CASE("hinge bound is tight at q = 0 and equals 2 c ell at w = 0") {
  const Dataset d = synth::binary_blobs(40, 4, 1.0, 3);
  TrainConfig cfg;
  cfg.c = 0.8;
  cfg.ell = 1.0;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal(0, 1);
  LinearModel m;
  m.loss = Loss::Hinge;
  m.w.resize(4);
  for (auto& v : m.w) v = normal(rng);
  m.b = 0.1;
  const double bound = variational_objective(m, d, cfg, e_step(m, d, cfg));
  const double exact = oracle::svm_objective(synth::to_dense(d), synth::labels(d), cfg.c, cfg.ell, m.w, m.b);
  CHECK(bound == doctest::Approx(exact).epsilon(1e-10));

  LinearModel zero;
  zero.loss = Loss::Hinge;
  zero.w = Eigen::VectorXd::Zero(4);
  cfg.noise = NoiseModel::dropout(0.6);
  cfg.ell = 1.5;
  const double at_zero = variational_objective(zero, d, cfg, e_step(zero, d, cfg));
  CHECK(at_zero == doctest::Approx(2 * cfg.c * cfg.ell * static_cast<double>(d.size())));
}

TEST_CASE("logistic bound is tight at q = 0") {
  const Dataset d = synth::binary_blobs(40, 4, 1.0, 13);
  TrainConfig cfg;
  cfg.c = 1.3;
  LinearModel m;
  m.loss = Loss::Logistic;
  m.w = Eigen::Vector4d(0.5, -0.2, 1.0, 0.3);
  m.b = -0.4;
  const double bound = variational_objective(m, d, cfg, e_step(m, d, cfg));
  const double exact = oracle::logistic_objective(synth::to_dense(d), synth::labels(d), cfg.c, m.w, m.b);
  CHECK(bound == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("variational objective descends for every engine") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Dataset cls = synth::random_sparse(40, 10, 0.4, seed, true);
    const synth::Split reg = synth::linear_regression(40, 1, 5, 0.5, 0.1, 5.0, seed);
    for (Loss loss : {Loss::Hinge, Loss::Logistic, Loss::EpsInsensitive}) {
      for (const NoiseModel& noise : {NoiseModel::none(), NoiseModel::dropout(0.5), NoiseModel::gaussian(0.2)}) {
        TrainConfig cfg;
        cfg.c = 0.5 + static_cast<double>(seed);
        cfg.noise = noise;
        cfg.irls_tol = 1e-9;
        TrainTrace trace;
        train_linear(loss, loss == Loss::EpsInsensitive ? reg.train : cls, cfg, &trace);
        for (std::size_t k = 1; k < trace.objective.size(); ++k) {
          CHECK(trace.objective[k] <= trace.objective[k - 1] + 1e-10 * std::abs(trace.objective[k - 1]));
        }
      }
    }
  }
}

TEST_CASE("E-step re-weights are locally optimal") {
  const Dataset d = synth::random_sparse(15, 5, 0.6, 21, true);
  for (Loss loss : {Loss::Hinge, Loss::Logistic}) {
    TrainConfig cfg;
    cfg.noise = NoiseModel::dropout(0.3);
    cfg.max_irls_iters = 3;
    const LinearModel m = train_linear(loss, d, cfg);
    const Reweights rw = e_step(m, d, cfg);
    const double base = variational_objective(m, d, cfg, rw);
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (double f : {0.9, 1.1}) {
        Reweights p = rw;
        p.gamma[i] *= f;
        CHECK(variational_objective(m, d, cfg, p) >= base - 1e-12 * std::abs(base));
      }
    }
  }
}

TEST_CASE("re-weighted quadratic loss matches explicit corruption") {
  const Dataset d = synth::random_sparse(8, 5, 0.7, 17, true);
  TrainConfig cfg;
  cfg.noise = NoiseModel::dropout(0.4);
  LinearModel m;
  m.loss = Loss::Hinge;
  m.w = Eigen::VectorXd::LinSpaced(5, -1, 1);
  m.b = 0.2;
  const Reweights rw = e_step(m, d, cfg);
  const ReweightedTargets rt = reweighted_targets(Loss::Hinge, d, cfg, rw);
  const double analytic = reweighted_quadratic_loss(m, d, cfg.noise, rt);
  std::mt19937_64 rng(4);
  const int samples = 100000;
  double sum = 0, sum_sq = 0;
  const Eigen::MatrixXd x = synth::to_dense(d);
  for (int s = 0; s < samples; ++s) {
    double v = m.w.squaredNorm();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Eigen::VectorXd xt = oracle::corrupt(x.row(i).transpose(), oracle::Corruption::Dropout, 0.4, rng);
      const double r = m.w.dot(xt) + m.b - rt.target[static_cast<std::size_t>(i)];
      v += rt.weight[static_cast<std::size_t>(i)] * r * r;
    }
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sum_sq / samples - mean * mean) / samples);
  CHECK(std::abs(mean - analytic) <= 3 * se);
}

TEST_CASE("dense and quasi-Newton M-steps agree") {
  const Dataset d = synth::random_sparse(50, 12, 0.3, 5, true);
  for (Loss loss : {Loss::Hinge, Loss::Logistic}) {
    TrainConfig cfg;
    cfg.noise = NoiseModel::dropout(0.3);
    cfg.max_irls_iters = 10;
    const LinearModel dense = train_linear(loss, d, cfg);
    cfg.dense_threshold = 1;
    cfg.lbfgs.tol = 1e-10;
    cfg.lbfgs.max_iter = 1000;
    const LinearModel sparse = train_linear(loss, d, cfg);
    CHECK((augmented(dense) - augmented(sparse)).norm() <= 1e-5 * augmented(dense).norm());
  }
}

TEST_CASE("training is deterministic and validates input") {
  const Dataset d = synth::random_sparse(20, 6, 0.5, 2);
  TrainConfig cfg;
  cfg.noise = NoiseModel::dropout(0.2);
  const LinearModel a = train_hinge(d, cfg);
  const LinearModel b = train_hinge(d, cfg);
  CHECK(a.w == b.w);
  CHECK(a.b == b.b);

  CHECK_THROWS_AS(train_hinge(Dataset{}, cfg), DataError);
  Dataset bad = d;
  bad.examples[0].y = 2.0;
  CHECK_THROWS_AS(train_hinge(bad, cfg), DataError);
  TrainConfig low_margin = cfg;
  low_margin.ell = 0.5;
  CHECK_THROWS_AS(train_hinge(d, low_margin), ParameterError);
  TrainConfig bad_c = cfg;
  bad_c.c = 0.0;
  CHECK_THROWS_AS(train_hinge(d, bad_c), ParameterError);
}

TEST_CASE("single-class data trains") {
  Dataset d = synth::random_sparse(10, 3, 0.8, 1);
  for (auto& ex : d.examples) ex.y = 1.0;
  TrainConfig cfg;
  const LinearModel m = train_hinge(d, cfg);
  CHECK(m.w.allFinite());
  CHECK(std::isfinite(m.b));
}

TEST_CASE("loss names round-trip") {
  for (Loss l : {Loss::Hinge, Loss::Logistic, Loss::EpsInsensitive}) CHECK(parse_loss(to_string(l)) == l);
  CHECK_THROWS_AS(parse_loss("squared"), ParameterError);
}
