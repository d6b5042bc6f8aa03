// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "slbfgs/linalg.hpp"
#include "slbfgs/optimizer.hpp"

#include <cstdint>

namespace slbfgs {

/// J(x) = 1/2 (x - x*)' (D + alpha L) (x - x*) on an m x m grid, with
/// D = diag(exp(-1), ..., exp(-n)), L the five-point Laplacian and x* = 1.
struct QuadraticProblem {
  Problem problem;
  Vector x_star;
  double alpha = 0.0;
  Vector data_diagonal;  ///< diag(D)
  OperatorPtr regularizer_hessian;  ///< alpha L
};

/// Throws std::invalid_argument if m < 1 or alpha <= 0.
QuadraticProblem make_quadratic(Eigen::Index m, double alpha);

/// Smooth non-convex stand-in with the same D + S split:
///   D(x) = sum_i (1 - cos(x_i - x*_i)) + gamma/2 |P (x - x*)|^2
///   S(x) = alpha/2 (x - x*)' L (x - x*)
/// with a random low-rank P. The regularizer Hessian alpha L is exact and all
/// non-convexity sits in D. Everything random is drawn from `seed`.
struct NonconvexProblem {
  Problem problem;
  Vector x_star;
  Vector x0;  ///< suggested start, far from x* so cosine curvature is indefinite
  double alpha = 0.0;
  double gamma = 0.0;
  DenseMatrix P;
};

NonconvexProblem make_nonconvex(Eigen::Index m, double alpha, std::uint64_t seed);

}  // namespace slbfgs
