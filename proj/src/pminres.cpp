// SPDX-License-Identifier: Apache-2.0
#include "slbfgs/pminres.hpp"

#include <cmath>
#include <stdexcept>

namespace slbfgs {

PminresResult pminres(const LinearOperator& op, const Vector& rhs, int maxiter,
                      double tol, const std::optional<Vector>& x0) {
  const Eigen::Index n = op.dimension();
  if (rhs.size() != n || (x0 && x0->size() != n)) {
    throw std::invalid_argument("pminres: dimension mismatch");
  }
  const Vector diag = op.diagonal();
  if ((diag.array() <= 0.0).any() || !diag.allFinite()) {
    throw std::invalid_argument("pminres: Jacobi preconditioner needs a positive diagonal");
  }

  PminresResult result;
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    result.x = Vector::Zero(n);
    result.stats = {0, 0.0, true};
    result.residual_history = {0.0};
    return result;
  }

  const Vector inv_sqrt = diag.array().rsqrt();
  auto scaled_apply = [&](const Vector& v) -> Vector {
    return inv_sqrt.cwiseProduct(op.apply(inv_sqrt.cwiseProduct(v)));
  };
  auto true_residual = [&](const Vector& u) {
    return (rhs - op.apply(inv_sqrt.cwiseProduct(u))).norm() / rhs_norm;
  };

  // u is the iterate of the scaled system; x = D^-1/2 u.
  Vector u = x0 ? Vector(x0->cwiseQuotient(inv_sqrt)) : Vector(Vector::Zero(n));
  const Vector scaled_rhs = inv_sqrt.cwiseProduct(rhs);
  const double scaled_rhs_norm = scaled_rhs.norm();

  Vector r = x0 ? Vector(scaled_rhs - scaled_apply(u)) : scaled_rhs;
  double beta = r.norm();
  double eta = beta;
  result.residual_history.push_back(beta / scaled_rhs_norm);

  double rel_res = true_residual(u);
  int it = 0;
  if (rel_res <= tol || beta == 0.0) {
    result.x = inv_sqrt.cwiseProduct(u);
    result.stats = {0, rel_res, rel_res <= tol};
    return result;
  }

  Vector v_old = Vector::Zero(n);
  Vector v = r / beta;
  Vector w_old = Vector::Zero(n);
  Vector w_older = Vector::Zero(n);
  double c = 1.0, c_old = 1.0;
  double s = 0.0, s_old = 0.0;
  bool check_true = false;

  while (it < maxiter) {
    ++it;
    // Lanczos step.
    Vector p = scaled_apply(v);
    const double alpha = v.dot(p);
    p -= alpha * v + beta * v_old;
    const double beta_next = p.norm();

    // Apply the two previous Givens rotations, then build the new one.
    const double delta = c * alpha - c_old * s * beta;
    const double rho1 = std::hypot(delta, beta_next);
    const double rho2 = s * alpha + c_old * c * beta;
    const double rho3 = s_old * beta;
    if (rho1 == 0.0) {
      // Singular projected system; nothing further can be gained.
      break;
    }
    const double c_next = delta / rho1;
    const double s_next = beta_next / rho1;

    Vector w = (v - rho3 * w_older - rho2 * w_old) / rho1;
    u += c_next * eta * w;
    eta = -s_next * eta;
    result.residual_history.push_back(std::abs(eta) / scaled_rhs_norm);

    w_older = std::move(w_old);
    w_old = std::move(w);
    c_old = c;
    s_old = s;
    c = c_next;
    s = s_next;

    if (beta_next == 0.0) {
      // Invariant Krylov subspace reached.
      rel_res = true_residual(u);
      break;
    }
    v_old = std::move(v);
    v = p / beta_next;
    beta = beta_next;

    if (check_true || std::abs(eta) / scaled_rhs_norm <= tol) {
      check_true = true;
      rel_res = true_residual(u);
      if (rel_res <= tol) break;
    }
  }

  if (!check_true) rel_res = true_residual(u);
  result.x = inv_sqrt.cwiseProduct(u);
  result.stats = {it, rel_res, rel_res <= tol};
  return result;
}

}  // namespace slbfgs
