// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "slbfgs/linalg.hpp"

#include <optional>
#include <vector>

namespace slbfgs {

struct SolveStats {
  int iterations = 0;
  /// ||rhs - A x|| / ||rhs|| of the returned iterate.
  double relative_residual = 0.0;
  bool converged = false;
};

struct PminresResult {
  Vector x;
  SolveStats stats;
  /// Relative preconditioned residual estimate, one entry per iteration
  /// (entry 0 is the initial residual). Non-increasing.
  std::vector<double> residual_history;
};

/// Jacobi-preconditioned MINRES for a symmetric operator with strictly
/// positive diagonal.
///
/// The preconditioner is applied symmetrically: MINRES runs on
/// D^-1/2 A D^-1/2 with D = diag(A). Iteration stops once the true relative
/// residual ||rhs - A x|| / ||rhs|| is <= tol or after `maxiter` steps. A
/// Lanczos breakdown ends the iteration with the current iterate.
///
/// Throws std::invalid_argument on a nonpositive diagonal entry or a
/// dimension mismatch.
PminresResult pminres(const LinearOperator& op, const Vector& rhs, int maxiter,
                      double tol, const std::optional<Vector>& x0 = std::nullopt);

}  // namespace slbfgs
