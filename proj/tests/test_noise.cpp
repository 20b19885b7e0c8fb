#include <doctest.h>

#include <cmath>
#include <random>

#include "dropsvm/errors.hpp"
#include "dropsvm/noise.hpp"

using namespace dropsvm;

namespace {

// Running mean/variance of each coordinate over many samples.
struct Accumulator {
  Eigen::VectorXd sum, sum_sq;
  int n = 0;
  explicit Accumulator(std::size_t d)
      : sum(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d))), sum_sq(sum) {}
  void add(const Eigen::VectorXd& v) {
    sum += v;
    sum_sq += v.cwiseProduct(v);
    ++n;
  }
  Eigen::VectorXd mean() const { return sum / n; }
  Eigen::VectorXd var() const {
    const Eigen::VectorXd m = mean();
    return (sum_sq / n - m.cwiseProduct(m)) * n / (n - 1.0);
  }
};

}  // namespace

TEST_CASE("dropout with q = 0 has zero variance") {
  const SparseVector x{{0, 1.0}, {1, 2.0}};
  const auto m = moments(x, NoiseModel::dropout(0.0), 2);
  CHECK(m.mean == x);
  CHECK(m.dense_var() == std::vector<double>{0.0, 0.0});
}

TEST_CASE("dropout variance q/(1-q) x^2") {
  const SparseVector x{{0, 2.0}};
  const auto m = moments(x, NoiseModel::dropout(0.5), 1);
  CHECK(m.dense_var()[0] == doctest::Approx(4.0).epsilon(1e-15));

  // Monte-Carlo check of the same value, 1e6 draws, +-1%.
  Accumulator acc(1);
  for (int s = 0; s < 1000000; ++s) acc.add(sample(x, NoiseModel::dropout(0.5), s, 1).to_dense(1));
  CHECK(std::abs(acc.var()[0] - 4.0) < 0.04);
}

TEST_CASE("gaussian variance is the parameter on every declared coordinate") {
  const SparseVector x{{0, 3.0}, {1, -1.0}};
  const auto m = moments(x, NoiseModel::gaussian(0.25), 3);
  CHECK(m.dense_var() == std::vector<double>{0.25, 0.25, 0.25});
}

TEST_CASE("laplace and poisson variances") {
  const SparseVector x{{1, 3.0}};
  CHECK(moments(x, NoiseModel::laplace(0.5), 2).dense_var() == std::vector<double>{0.5, 0.5});
  CHECK(moments(x, NoiseModel::poisson(), 2).dense_var() == std::vector<double>{0.0, 3.0});
  CHECK(moments(x, NoiseModel::none(), 2).dense_var() == std::vector<double>{0.0, 0.0});
}

TEST_CASE("invalid parameters and domains") {
  CHECK_THROWS_AS(NoiseModel::dropout(1.0), ParameterError);
  CHECK_THROWS_AS(NoiseModel::dropout(-0.1), ParameterError);
  CHECK_THROWS_AS(NoiseModel::gaussian(-1.0), ParameterError);
  const SparseVector neg{{0, -1.0}};
  CHECK_THROWS_AS(moments(neg, NoiseModel::poisson(), 1), DomainError);
  CHECK_THROWS_AS(sample(neg, NoiseModel::poisson(), 1, 1), DomainError);
  CHECK_THROWS_AS(moments(SparseVector{{4, 1.0}}, NoiseModel::none(), 2), DomainError);
}

TEST_CASE("sampling identities") {
  const SparseVector x{{0, 1.5}, {3, -2.0}};
  CHECK(sample(x, NoiseModel::dropout(0.0), 7, 4) == x);
  CHECK(sample(x, NoiseModel::none(), 7, 4) == x);
  // Same seed, same draw.
  CHECK(sample(x, NoiseModel::dropout(0.4), 99, 4) == sample(x, NoiseModel::dropout(0.4), 99, 4));
  CHECK(sample(x, NoiseModel::gaussian(1.0), 5, 4) == sample(x, NoiseModel::gaussian(1.0), 5, 4));
}

TEST_CASE("dropout draws are zero or rescaled") {
  const SparseVector x{{0, 1.0}, {1, 1.0}};
  Accumulator acc(2);
  for (int s = 0; s < 100000; ++s) {
    const SparseVector v = sample(x, NoiseModel::dropout(0.3), s, 2);
    for (double val : v.values()) CHECK(val == doctest::Approx(1.0 / 0.7).epsilon(1e-15));
    acc.add(v.to_dense(2));
  }
  CHECK(std::abs(acc.mean()[0] - 1.0) < 0.01);
  CHECK(std::abs(acc.mean()[1] - 1.0) < 0.01);
}

TEST_CASE("unbiasedness and moment consistency for every family") {
  const SparseVector x{{0, 1.0}, {2, 3.0}, {3, 0.5}};
  const std::size_t dim = 5;
  const NoiseModel models[] = {NoiseModel::dropout(0.4), NoiseModel::gaussian(0.7),
                               NoiseModel::laplace(0.6), NoiseModel::poisson()};
  for (const NoiseModel& model : models) {
    CAPTURE(to_string(model.kind()));
    Accumulator acc(dim);
    const int n = 100000;
    for (int s = 0; s < n; ++s) acc.add(sample(x, model, derive_seed(11, s), dim).to_dense(dim));
    const auto m = moments(x, model, dim);
    const Eigen::VectorXd truth = x.to_dense(dim);
    const std::vector<double> var = m.dense_var();
    const Eigen::VectorXd emp_var = acc.var();
    for (std::size_t d = 0; d < dim; ++d) {
      const auto j = static_cast<Eigen::Index>(d);
      const double se_mean = std::sqrt(var[d] / n);
      CHECK(std::abs(acc.mean()[j] - truth[j]) <= 3 * se_mean + 1e-12);
      // Variance standard error from the fourth moment is family specific;
      // a 3% band covers all of them at n = 1e5.
      CHECK(std::abs(emp_var[j] - var[d]) <= 0.03 * var[d] + 1e-12);
    }
  }
}

TEST_CASE("moments are deterministic") {
  const SparseVector x{{1, 2.0}};
  const auto a = moments(x, NoiseModel::dropout(0.2), 3);
  const auto b = moments(x, NoiseModel::dropout(0.2), 3);
  CHECK(a.mean == b.mean);
  CHECK(a.var == b.var);
}

TEST_CASE("weighted variance") {
  const SparseVector x{{0, 1.0}, {2, 2.0}};
  const auto m = moments(x, NoiseModel::dropout(0.5), 3);
  Eigen::VectorXd w(3);
  w << 1.0, 5.0, -2.0;
  CHECK(m.weighted_variance(w) == doctest::Approx(1.0 * 1 + 4.0 * 4));
  const auto g = moments(x, NoiseModel::gaussian(0.5), 3);
  CHECK(g.weighted_variance(w) == doctest::Approx(0.5 * (1 + 25 + 4)));
}

TEST_CASE("noise kind names round-trip") {
  for (auto k : {NoiseKind::None, NoiseKind::Dropout, NoiseKind::Gaussian, NoiseKind::Laplace,
                 NoiseKind::Poisson}) {
    CHECK(parse_noise_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_noise_kind("salt"), ParameterError);
}
