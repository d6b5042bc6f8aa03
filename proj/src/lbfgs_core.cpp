// SPDX-License-Identifier: Apache-2.0
#include "slbfgs/lbfgs_core.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace slbfgs {

void Memory::push(UpdatePair pair) {
  pairs_.push_back(std::move(pair));
  if (capacity_ && pairs_.size() > *capacity_) pairs_.pop_front();
}

bool try_store(Memory& mem, const Vector& s, const Vector& y, double c_s) {
  if (s.size() != y.size()) {
    throw std::invalid_argument("try_store: dimension mismatch");
  }
  const double ss = s.squaredNorm();
  if (ss == 0.0) {
    throw std::invalid_argument("try_store: s = 0");
  }
  const double rho = s.dot(y);
  if (!(rho > c_s * ss) || mem.capacity() == std::size_t{0}) return false;
  mem.push({s, y, rho, ss});
  return true;
}

SeedApplier SeedApplier::identity_scaled(double tau_hat) {
  if (!(tau_hat > 0.0)) {
    throw std::invalid_argument("SeedApplier: tau_hat must be positive");
  }
  SeedApplier a;
  a.tau_ = tau_hat;
  return a;
}

SeedApplier SeedApplier::structured(double tau, const LinearOperator& S,
                                    SeedSolve solve) {
  // tau = 0 is admissible when S itself is positive definite; the solve
  // reports failure otherwise.
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("SeedApplier: tau must be nonnegative");
  }
  SeedApplier a;
  a.tau_ = tau;
  a.S_ = &S;
  a.solve_ = solve;
  return a;
}

Vector SeedApplier::apply_inverse(const Vector& q, SolveStats* stats) const {
  if (!S_) return tau_ * q;

  if (dynamic_cast<const ZeroOperator*>(S_)) {
    if (!(tau_ > 0.0)) {
      throw std::runtime_error("SeedApplier: seed matrix is not positive definite");
    }
    if (stats) *stats = SolveStats{0, 0.0, true};
    return q / tau_;
  }

  if (solve_.mode == SeedSolve::Mode::exact) {
    DenseMatrix b = to_dense(*S_);
    b.diagonal().array() += tau_;
    Eigen::LLT<DenseMatrix> llt(b);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("SeedApplier: seed matrix is not positive definite");
    }
    Vector r = llt.solve(q);
    if (stats) {
      const double qn = q.norm();
      stats->iterations = 0;
      stats->relative_residual = qn > 0.0 ? (q - b * r).norm() / qn : 0.0;
      stats->converged = true;
    }
    return r;
  }

  const ShiftedOperator seed_op(tau_, *S_);
  PminresResult res = pminres(seed_op, q, solve_.maxiter, solve_.tol);
  if (stats) *stats = res.stats;
  return std::move(res.x);
}

Vector SeedApplier::seed_diagonal(Eigen::Index n) const {
  if (!S_) return Vector::Constant(n, 1.0 / tau_);
  return S_->diagonal().array() + tau_;
}

SeedApplier SeedApplier::with_tolerance_scaled(double factor) const {
  SeedApplier a = *this;
  a.solve_.tol *= factor;
  return a;
}

Vector two_loop(const Vector& grad, const Memory& mem, const SeedApplier& seed,
                SolveStats* stats) {
  const auto& pairs = mem.pairs();
  std::vector<double> coeff(pairs.size());
  Vector q = grad;
  for (std::size_t i = pairs.size(); i-- > 0;) {
    coeff[i] = pairs[i].s.dot(q) / pairs[i].rho;
    q -= coeff[i] * pairs[i].y;
  }
  Vector r = seed.apply_inverse(q, stats);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double b = pairs[i].y.dot(r) / pairs[i].rho;
    r += (coeff[i] - b) * pairs[i].s;
  }
  return -r;
}

}  // namespace slbfgs
