// SPDX-License-Identifier: Apache-2.0
#include "slbfgs/linalg.hpp"

#include <stdexcept>
#include <utility>

namespace slbfgs {

double dot(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("dot: dimension mismatch");
  }
  return u.dot(v);
}

bool all_finite(const Vector& v) { return v.allFinite(); }

DenseOperator::DenseOperator(DenseMatrix a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols()) {
    throw std::invalid_argument("DenseOperator: matrix must be square");
  }
}

Vector DenseOperator::apply(const Vector& v) const { return a_ * v; }

DiagonalOperator::DiagonalOperator(Vector d) : d_(std::move(d)) {}

Vector DiagonalOperator::apply(const Vector& v) const {
  return d_.cwiseProduct(v);
}

Vector ZeroOperator::apply(const Vector& v) const {
  return Vector::Zero(v.size());
}

Laplacian2D::Laplacian2D(Eigen::Index m) : m_(m) {
  if (m < 1) {
    throw std::invalid_argument("laplacian_2d: grid size must be >= 1");
  }
}

Vector Laplacian2D::apply(const Vector& v) const {
  if (v.size() != m_ * m_) {
    throw std::invalid_argument("Laplacian2D::apply: dimension mismatch");
  }
  Vector out(v.size());
  for (Eigen::Index i = 0; i < m_; ++i) {
    for (Eigen::Index j = 0; j < m_; ++j) {
      const Eigen::Index p = i * m_ + j;
      double acc = 4.0 * v[p];
      if (i > 0) acc -= v[p - m_];
      if (i + 1 < m_) acc -= v[p + m_];
      if (j > 0) acc -= v[p - 1];
      if (j + 1 < m_) acc -= v[p + 1];
      out[p] = acc;
    }
  }
  return out;
}

ScaledOperator::ScaledOperator(double scale, OperatorPtr a)
    : scale_(scale), a_(std::move(a)) {
  if (!a_) throw std::invalid_argument("ScaledOperator: null operator");
}

OperatorPtr laplacian_2d(Eigen::Index m) {
  return std::make_shared<Laplacian2D>(m);
}

DenseMatrix to_dense(const LinearOperator& op) {
  const Eigen::Index n = op.dimension();
  DenseMatrix a(n, n);
  Vector e = Vector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    a.col(j) = op.apply(e);
    e[j] = 0.0;
  }
  return a;
}

}  // namespace slbfgs
