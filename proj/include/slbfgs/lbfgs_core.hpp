// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "slbfgs/linalg.hpp"
#include "slbfgs/pminres.hpp"

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>

namespace slbfgs {

/// One correction pair (s, y) with inner products cached at storage time.
struct UpdatePair {
  Vector s;
  Vector y;
  double rho;        ///< y's
  double s_norm_sq;  ///< |s|^2
};

/// Bounded FIFO of correction pairs, oldest first. An empty capacity means
/// unlimited memory.
class Memory {
 public:
  explicit Memory(std::optional<std::size_t> capacity) : capacity_(capacity) {}

  static Memory unbounded() { return Memory(std::nullopt); }

  std::optional<std::size_t> capacity() const { return capacity_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const std::deque<UpdatePair>& pairs() const { return pairs_; }

  /// Appends unconditionally, evicting the oldest pair when over capacity.
  /// Callers are expected to have checked curvature already.
  void push(UpdatePair pair);
  void clear() { pairs_.clear(); }

 private:
  std::optional<std::size_t> capacity_;
  std::deque<UpdatePair> pairs_;
};

/// Cautious storage: appends (s, y) iff y's > c_s |s|^2. Pass c_s = 0 for the
/// classical rule y's > 0. Returns whether the pair passed the test.
///
/// Throws std::invalid_argument if s = 0 or the lengths differ.
bool try_store(Memory& mem, const Vector& s, const Vector& y, double c_s);

/// How the structured seed system (tau I + S) r = q is solved.
struct SeedSolve {
  enum class Mode { exact, krylov };
  Mode mode = Mode::exact;
  int maxiter = 50;
  double tol = 1e-2;
};

/// Applies the inverse seed H^(0) inside the two-loop recursion.
///
/// Identity-scaled mode uses H^(0) = tau_hat I. Structured mode uses
/// B^(0) = tau I + S and solves with either a dense Cholesky factorization or
/// Jacobi-preconditioned MINRES. A ZeroOperator S reduces to division by tau.
class SeedApplier {
 public:
  static SeedApplier identity_scaled(double tau_hat);
  /// `S` must outlive the applier.
  static SeedApplier structured(double tau, const LinearOperator& S,
                                SeedSolve solve = {});

  bool is_structured() const { return S_ != nullptr; }
  double tau() const { return tau_; }
  const SeedSolve& solve() const { return solve_; }

  /// r = H^(0) q. Inner-solver statistics are written to `stats` when given
  /// (structured mode only).
  Vector apply_inverse(const Vector& q, SolveStats* stats = nullptr) const;

  /// diag(B^(0)).
  Vector seed_diagonal(Eigen::Index n) const;

  /// Same seed, inner tolerance scaled by `factor` (no-op for exact solves).
  SeedApplier with_tolerance_scaled(double factor) const;

 private:
  SeedApplier() = default;

  double tau_ = 1.0;  ///< tau_hat in identity mode, tau in structured mode
  const LinearOperator* S_ = nullptr;
  SeedSolve solve_;
};

/// d = -H grad, where H is the inverse of the L-BFGS operator built from
/// `seed` and the pairs of `mem` (two-loop recursion).
Vector two_loop(const Vector& grad, const Memory& mem, const SeedApplier& seed,
                SolveStats* stats = nullptr);

}  // namespace slbfgs
