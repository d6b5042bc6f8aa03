// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "slbfgs/lbfgs_core.hpp"
#include "slbfgs/line_search.hpp"
#include "slbfgs/linalg.hpp"
#include "slbfgs/pminres.hpp"
#include "slbfgs/scaling.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace slbfgs {

/// Objective J = D + S with optional structural information.
///
/// `data_gradient` (grad D) enables the quadratic-regularizer shortcut for z,
/// `regularizer_hessian` supplies S_k for the structured seed (the zero
/// operator is used when absent), and `dense_hessian` is only used by
/// diagnostics.
struct Problem {
  Eigen::Index dimension = 0;
  std::function<double(const Vector&)> evaluate;
  std::function<Vector(const Vector&)> gradient;
  std::function<Vector(const Vector&)> data_gradient;
  std::function<OperatorPtr(const Vector&)> regularizer_hessian;
  std::function<DenseMatrix(const Vector&)> dense_hessian;
};

/// Hs/Hy: classical L-BFGS with BB-scaled identity seed.
/// Bs/Bz/Bu/Bg/Adap: structured seed tau I + S_k with the named tau rule.
enum class SeedStrategy { hs, hy, bs, bz, bu, bg, adap };

std::string_view to_string(SeedStrategy s);
/// Accepts the lower-case names ("hs", ..., "adap"). Throws
/// std::invalid_argument otherwise.
SeedStrategy parse_strategy(std::string_view name);
bool is_structured(SeedStrategy s);

/// Cautious-update constants; defaults are the published table.
struct CautiousParams {
  double c_s = 1e-9;
  double c0 = 1e-6;
  double C0 = 1e6;
  double c1 = 1e-6;
  double c2 = 1.0;
};

struct StoppingRule {
  /// epsilon of the gradient rule; disabled when negative.
  double grad_tol = 1e-13;
  /// Stop when all three relative change tests hold (see check_stopping).
  bool fair_triple = false;
  double tol_j = 1e-5;
  double tol_x = 1e-3;
  double tol_g = 1e-3;
};

struct OptimizerConfig {
  /// Number of stored pairs; std::nullopt means unlimited.
  std::optional<std::size_t> memory = 5;
  SeedStrategy strategy = SeedStrategy::bs;
  CautiousParams cautious;
  /// Initial tau (structured) or tau_hat (classical).
  double tau0 = 1.0;
  LineSearchConfig line_search;
  SeedSolve inner;
  StoppingRule stopping;
  long max_iter = 10000;
  bool use_quadratic_shortcut = false;
  AdapParams adap;
  /// Keep x_k and d_k of every iteration in the result.
  bool record_iterates = false;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

struct IterationRecord {
  long k = 0;
  double J = 0.0;
  double grad_norm = 0.0;
  /// Step taken from x_k; empty on the final record.
  std::optional<double> alpha;
  /// tau_k (structured) or tau_hat_k (classical) used for the seed at x_k.
  double tau = 0.0;
  int n_ls = 0;
  bool pair_accepted = false;
  /// Sign of z's (structured) or y's (classical) of this step.
  int rho_sign = 0;
  std::optional<SolveStats> inner;
  bool fallback_used = false;
  std::optional<double> cos_newton;
  std::optional<double> ratio_newton;

  // Audit data, not part of the CSV trace.
  double curvature = 0.0;  ///< y's
  double s_norm_sq = 0.0;
  std::optional<double> tau_next;
  std::optional<double> tau_lo;
  std::optional<double> tau_hi;
  std::optional<double> omega_l;
  std::optional<double> omega_u;
};

enum class Status {
  converged_gradient,
  converged_fair,
  max_iterations,
  line_search_failure,
  non_finite,
};

std::string_view to_string(Status s);
bool is_converged(Status s);

struct OptimizeResult {
  Vector x;
  std::vector<IterationRecord> trace;
  Status status = Status::max_iterations;
  std::optional<Vector> offending_iterate;
  std::vector<Vector> iterates;    ///< x_0..x_K when record_iterates
  std::vector<Vector> directions;  ///< d_0..d_{K-1} when record_iterates
  long n_fevals = 0;
  long n_gevals = 0;
  int fallback_count = 0;

  /// Number of steps taken.
  long iterations() const {
    return trace.empty() ? 0 : trace.back().k;
  }
};

/// Structured L-BFGS with cautious updates. Requires a structured strategy.
OptimizeResult slbfgs_minimize(const Problem& problem, const Vector& x0,
                               const OptimizerConfig& cfg);

/// Classical inverse L-BFGS with H^(0) = tau_hat I; pairs are stored iff
/// y's > 0. Requires strategy hs or hy.
OptimizeResult lbfgs_minimize(const Problem& problem, const Vector& x0,
                              const OptimizerConfig& cfg);

/// Dispatches on cfg.strategy.
OptimizeResult minimize(const Problem& problem, const Vector& x0,
                        const OptimizerConfig& cfg);

struct DirectionChoice {
  Vector d;
  bool fallback_used = false;
  bool retried = false;
  SolveStats inner;
};

using DirectionFn = std::function<Vector(const Vector&, const Memory&,
                                         const SeedApplier&, SolveStats*)>;

/// Two-loop direction with a descent guard: if grad'd >= 0 the seed system
/// is re-solved once with a ten times tighter inner tolerance (Krylov mode),
/// and if that is still not a descent direction the diagonally scaled
/// gradient -diag(B^(0))^-1 grad is returned. `direction_fn` replaces the
/// two-loop recursion (tests use it to inject bad directions).
DirectionChoice choose_direction_with_fallback(
    const Vector& grad, const Memory& mem, const SeedApplier& seed,
    const DirectionFn& direction_fn = {});

enum class StopDecision { proceed, gradient, fair };

/// Termination test at x_curr. The gradient rule fires when
/// ||grad J|| <= rule.grad_tol. The triple rule needs a previous record and
/// fires when |dJ| <= tol_j (1 + |J0|), ||dx|| <= tol_x (1 + ||x_curr||) and
/// ||grad J|| <= tol_g (1 + |J0|) all hold.
StopDecision check_stopping(const IterationRecord* prev,
                            const IterationRecord& curr, const Vector* x_prev,
                            const Vector& x_curr, const StoppingRule& rule,
                            double j0);

}  // namespace slbfgs
