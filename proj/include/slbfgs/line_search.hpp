// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

namespace slbfgs {

enum class LineSearchKind { armijo, wolfe, strong_wolfe };

/// Step-length parameters.
///
/// Defaults follow the published settings: Armijo reduction 1e-4 with
/// halving and at most 50 trials; Wolfe ftol 1e-4, gtol 0.9, maxfev 3000,
/// steps in [0, 2] and relative interval tolerance 1e-6.
struct LineSearchConfig {
  LineSearchKind kind = LineSearchKind::armijo;
  double sigma = 1e-4;
  double beta = 0.5;
  double eta = 0.9;
  int max_steps = 50;

  int max_fev = 3000;
  double step_max = 2.0;
  double step_min = 0.0;
  double xtol = 1e-6;

  /// Throws std::invalid_argument unless 0 < sigma < 1, 0 < beta < 1 and,
  /// for Wolfe kinds, sigma < eta < 1.
  void validate() const;
};

struct LineSearchResult {
  double alpha = 0.0;
  double value = 0.0;  ///< phi(alpha)
  int n_evals = 0;     ///< phi invocations
  int n_grad_evals = 0;
  bool success = false;
};

using ScalarFn = std::function<double(double)>;

/// Backtracking over {1, beta, beta^2, ...} until
/// phi(alpha) <= phi0 + alpha * sigma * slope0, with at most cfg.max_steps
/// trials. On failure `alpha` is the last trial.
///
/// Throws std::invalid_argument if slope0 >= 0.
LineSearchResult armijo_backtrack(const ScalarFn& phi, double phi0,
                                  double slope0, const LineSearchConfig& cfg);

/// Bracketing/zoom search for a step satisfying the Armijo condition and the
/// weak or strong Wolfe curvature condition selected by cfg.kind. Trial
/// points inside a bracket come from a safeguarded cubic fit.
///
/// Throws std::invalid_argument if slope0 >= 0 or cfg.kind is armijo.
LineSearchResult wolfe_search(const ScalarFn& phi, const ScalarFn& dphi,
                              double phi0, double slope0,
                              const LineSearchConfig& cfg);

}  // namespace slbfgs
