// SPDX-License-Identifier: Apache-2.0
#include "slbfgs/problems.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

namespace slbfgs {

namespace {
constexpr double kPi = 3.14159265358979323846;
}  // namespace

QuadraticProblem make_quadratic(Eigen::Index m, double alpha) {
  if (m < 1) throw std::invalid_argument("make_quadratic: m must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("make_quadratic: alpha must be > 0");

  const Eigen::Index n = m * m;
  QuadraticProblem q;
  q.alpha = alpha;
  q.x_star = Vector::Ones(n);
  q.data_diagonal.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    q.data_diagonal[j] = std::exp(-static_cast<double>(j + 1));
  }
  const OperatorPtr lap = laplacian_2d(m);
  q.regularizer_hessian = std::make_shared<ScaledOperator>(alpha, lap);

  const Vector dd = q.data_diagonal;
  const Vector xs = q.x_star;
  const OperatorPtr reg = q.regularizer_hessian;

  Problem& p = q.problem;
  p.dimension = n;
  p.evaluate = [dd, xs, reg](const Vector& x) {
    const Vector e = x - xs;
    return 0.5 * e.dot(dd.cwiseProduct(e) + reg->apply(e));
  };
  p.gradient = [dd, xs, reg](const Vector& x) -> Vector {
    const Vector e = x - xs;
    return dd.cwiseProduct(e) + reg->apply(e);
  };
  p.data_gradient = [dd, xs](const Vector& x) -> Vector {
    return dd.cwiseProduct(x - xs);
  };
  p.regularizer_hessian = [reg](const Vector&) { return reg; };
  p.dense_hessian = [dd, reg](const Vector&) -> DenseMatrix {
    DenseMatrix h = to_dense(*reg);
    h.diagonal() += dd;
    return h;
  };
  return q;
}

NonconvexProblem make_nonconvex(Eigen::Index m, double alpha, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("make_nonconvex: m must be >= 1");
  if (!(alpha >= 0.0)) throw std::invalid_argument("make_nonconvex: alpha must be >= 0");

  const Eigen::Index n = m * m;
  constexpr Eigen::Index kRank = 2;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  NonconvexProblem nc;
  nc.alpha = alpha;
  nc.gamma = 0.05;
  nc.x_star.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) nc.x_star[i] = unif(rng);
  nc.P.resize(kRank, n);
  for (Eigen::Index r = 0; r < kRank; ++r) {
    for (Eigen::Index i = 0; i < n; ++i) nc.P(r, i) = normal(rng) / std::sqrt(double(n));
  }
  // Start each coordinate within 1 of a maximum of 1 - cos, where its curvature is negative.
  nc.x0.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sign = unif(rng) < 0.0 ? -1.0 : 1.0;
    nc.x0[i] = nc.x_star[i] + sign * (kPi - 0.5 * (unif(rng) + 1.0));
  }

  const OperatorPtr reg =
      std::make_shared<ScaledOperator>(alpha, laplacian_2d(m));
  const Vector xs = nc.x_star;
  const DenseMatrix P = nc.P;
  const double gamma = nc.gamma;

  auto data_value = [xs, P, gamma](const Vector& x) {
    const Vector e = x - xs;
    return (1.0 - e.array().cos()).sum() + 0.5 * gamma * (P * e).squaredNorm();
  };
  auto data_grad = [xs, P, gamma](const Vector& x) -> Vector {
    const Vector e = x - xs;
    return Vector(e.array().sin()) + gamma * (P.transpose() * (P * e));
  };

  Problem& p = nc.problem;
  p.dimension = n;
  p.evaluate = [data_value, xs, reg](const Vector& x) {
    const Vector e = x - xs;
    return data_value(x) + 0.5 * e.dot(reg->apply(e));
  };
  p.gradient = [data_grad, xs, reg](const Vector& x) -> Vector {
    return data_grad(x) + reg->apply(x - xs);
  };
  p.data_gradient = data_grad;
  p.regularizer_hessian = [reg](const Vector&) { return reg; };
  p.dense_hessian = [xs, P, gamma, reg](const Vector& x) -> DenseMatrix {
    DenseMatrix h = gamma * P.transpose() * P + to_dense(*reg);
    h.diagonal() += Vector((x - xs).array().cos());
    return h;
  };
  return nc;
}

}  // namespace slbfgs
