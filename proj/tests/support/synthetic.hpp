#ifndef DROPSVM_TESTS_SYNTHETIC_HPP
#define DROPSVM_TESTS_SYNTHETIC_HPP

// Seeded synthetic datasets shared by the unit and acceptance suites.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dropsvm/dataset.hpp"

namespace synth {

inline dropsvm::Dataset from_dense(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   dropsvm::TaskKind task, int classes = 0) {
  dropsvm::Dataset d;
  d.dimension = static_cast<std::size_t>(x.cols());
  d.task = task;
  d.num_classes = classes;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    d.examples.push_back({dropsvm::SparseVector::from_dense(x.row(i).transpose()), y[i], 1.0});
  }
  return d;
}

inline Eigen::MatrixXd to_dense(const dropsvm::Dataset& d) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.dim()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = d.examples[i].x.to_dense(d.dim()).transpose();
  }
  return x;
}

inline Eigen::VectorXd labels(const dropsvm::Dataset& d) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) y[static_cast<Eigen::Index>(i)] = d.examples[i].y;
  return y;
}

struct Split {
  dropsvm::Dataset train;
  dropsvm::Dataset test;
};

/// Two Gaussian classes with means +/- mu along a random direction.
inline dropsvm::Dataset binary_blobs(std::size_t n, std::size_t d, double separation,
                                     std::uint64_t seed, double sparsity = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0, 1);
  std::uniform_real_distribution<double> unif(0, 1);
  Eigen::VectorXd dir(static_cast<Eigen::Index>(d));
  for (auto& v : dir) v = normal(rng);
  dir.normalize();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    y[i] = unif(rng) < 0.5 ? 1.0 : -1.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      x(i, j) = normal(rng) + 0.5 * separation * y[i] * dir[j];
      if (unif(rng) < sparsity) x(i, j) = 0.0;
    }
  }
  return from_dense(x, y, dropsvm::TaskKind::Binary);
}

/// Random sparse binary dataset with arbitrary labels; useful for property
/// checks where only the algebra matters.
inline dropsvm::Dataset random_sparse(std::size_t n, std::size_t d, double density,
                                      std::uint64_t seed, bool nonnegative = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0, 1);
  std::uniform_real_distribution<double> unif(0, 1);
  dropsvm::Dataset data;
  data.dimension = d;
  data.task = dropsvm::TaskKind::Binary;
  for (std::size_t i = 0; i < n; ++i) {
    dropsvm::Example ex;
    for (std::size_t j = 0; j < d; ++j) {
      if (unif(rng) < density) {
        const double v = normal(rng);
        ex.x.push_back(static_cast<dropsvm::Index>(j), nonnegative ? std::abs(v) : v);
      }
    }
    ex.y = unif(rng) < 0.5 ? 1.0 : -1.0;
    data.examples.push_back(std::move(ex));
  }
  return data;
}

/// Planted over-fitting regime: few training examples, many rare features
/// that each fire for one class only, a handful of frequent irrelevant
/// features and 10% label noise. An unregularized-by-noise fit leans on the
/// frequent noise features; dropout penalizes them in proportion to how
/// often they fire.
inline Split planted_overfit(std::size_t n_train, std::size_t n_test, std::size_t informative,
                             std::size_t irrelevant, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0, 1);
  const std::size_t d = informative + irrelevant;
  const std::size_t half = informative / 2;
  auto make = [&](std::size_t n) {
    dropsvm::Dataset data;
    data.dimension = d;
    data.task = dropsvm::TaskKind::Binary;
    for (std::size_t i = 0; i < n; ++i) {
      dropsvm::Example ex;
      const double y = unif(rng) < 0.5 ? 1.0 : -1.0;
      const std::size_t lo = y > 0 ? 0 : half;
      for (std::size_t j = 0; j < d; ++j) {
        const bool own = j >= lo && j < lo + half;
        const double p = j < informative ? (own ? 0.03 : 0.0) : 0.5;
        if (p > 0 && unif(rng) < p) ex.x.push_back(static_cast<dropsvm::Index>(j), 1.0);
      }
      ex.y = unif(rng) < 0.1 ? -y : y;
      data.examples.push_back(std::move(ex));
    }
    return data;
  };
  Split s;
  s.train = make(n_train);
  s.test = make(n_test);
  return s;
}

/// y = w'x + b + noise, with a fraction of responses hit by large sparse
/// outliers when `outlier_rate` > 0.
inline Split linear_regression(std::size_t n_train, std::size_t n_test, std::size_t d,
                               double noise_sd, double outlier_rate, double outlier_scale,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0, 1);
  std::uniform_real_distribution<double> unif(0, 1);
  Eigen::VectorXd w(static_cast<Eigen::Index>(d));
  for (auto& v : w) v = normal(rng);
  const double b = 0.5;
  auto make = [&](std::size_t n, bool outliers) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = normal(rng);
      y[i] = x.row(i).dot(w) + b + noise_sd * normal(rng);
      if (outliers && unif(rng) < outlier_rate) {
        y[i] += outlier_scale * (unif(rng) < 0.5 ? -1.0 : 1.0) * (1.0 + unif(rng));
      }
    }
    return from_dense(x, y, dropsvm::TaskKind::Regression);
  };
  Split s;
  s.train = make(n_train, outlier_rate > 0);
  s.test = make(n_test, false);
  return s;
}

/// The four XOR points in {0,1}^2 with labels +1 on (0,1), (1,0).
inline dropsvm::Dataset xor4() {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 0, 1, 1, 0, 1, 1;
  Eigen::VectorXd y(4);
  y << -1, 1, 1, -1;
  return from_dense(x, y, dropsvm::TaskKind::Binary);
}

/// C Gaussian blobs in d dimensions with unit-norm-separated centers.
inline dropsvm::Dataset multiclass_blobs(std::size_t n, std::size_t d, int classes,
                                         double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0, 1);
  Eigen::MatrixXd centers(classes, static_cast<Eigen::Index>(d));
  for (int k = 0; k < classes; ++k) {
    for (Eigen::Index j = 0; j < centers.cols(); ++j) centers(k, j) = 4.0 * normal(rng);
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int k = static_cast<int>(i % classes);
    y[i] = k;
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = centers(k, j) + spread * normal(rng);
  }
  return from_dense(x, y, dropsvm::TaskKind::Multiclass, classes);
}

}  // namespace synth

#endif  // DROPSVM_TESTS_SYNTHETIC_HPP
