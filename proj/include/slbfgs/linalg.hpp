// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <memory>

namespace slbfgs {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

/// Euclidean inner product. Throws std::invalid_argument on length mismatch.
double dot(const Vector& u, const Vector& v);

/// True if every entry is finite.
bool all_finite(const Vector& v);

/// Symmetric linear operator X -> X.
///
/// Implementations are immutable after construction; `apply` must be
/// deterministic and free of side effects so operators can be shared
/// read-only between threads.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual Vector apply(const Vector& v) const = 0;
  virtual Vector diagonal() const = 0;
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(DenseMatrix a);

  Eigen::Index dimension() const override { return a_.rows(); }
  Vector apply(const Vector& v) const override;
  Vector diagonal() const override { return a_.diagonal(); }
  const DenseMatrix& matrix() const { return a_; }

 private:
  DenseMatrix a_;
};

class DiagonalOperator final : public LinearOperator {
 public:
  explicit DiagonalOperator(Vector d);

  Eigen::Index dimension() const override { return d_.size(); }
  Vector apply(const Vector& v) const override;
  Vector diagonal() const override { return d_; }

 private:
  Vector d_;
};

/// The zero operator, used as S_k when a problem has no regularizer Hessian.
class ZeroOperator final : public LinearOperator {
 public:
  explicit ZeroOperator(Eigen::Index n) : n_(n) {}

  Eigen::Index dimension() const override { return n_; }
  Vector apply(const Vector& v) const override;
  Vector diagonal() const override { return Vector::Zero(n_); }

 private:
  Eigen::Index n_;
};

/// Matrix-free negative Laplacian on an m x m interior grid with zero
/// Dirichlet boundary: 4 on the diagonal, -1 for each grid neighbour.
/// Unknowns are ordered row-major, index = i * m + j.
class Laplacian2D final : public LinearOperator {
 public:
  explicit Laplacian2D(Eigen::Index m);

  Eigen::Index dimension() const override { return m_ * m_; }
  Eigen::Index grid_size() const { return m_; }
  Vector apply(const Vector& v) const override;
  Vector diagonal() const override { return Vector::Constant(m_ * m_, 4.0); }

 private:
  Eigen::Index m_;
};

/// scale * A.
class ScaledOperator final : public LinearOperator {
 public:
  ScaledOperator(double scale, OperatorPtr a);

  Eigen::Index dimension() const override { return a_->dimension(); }
  Vector apply(const Vector& v) const override { return scale_ * a_->apply(v); }
  Vector diagonal() const override { return scale_ * a_->diagonal(); }

 private:
  double scale_;
  OperatorPtr a_;
};

/// shift * I + A. Non-owning; `a` must outlive the view.
class ShiftedOperator final : public LinearOperator {
 public:
  ShiftedOperator(double shift, const LinearOperator& a) : shift_(shift), a_(a) {}

  Eigen::Index dimension() const override { return a_.dimension(); }
  Vector apply(const Vector& v) const override { return shift_ * v + a_.apply(v); }
  Vector diagonal() const override {
    return a_.diagonal().array() + shift_;
  }

 private:
  double shift_;
  const LinearOperator& a_;
};

OperatorPtr laplacian_2d(Eigen::Index m);

/// Materializes an operator by applying it to the unit vectors.
DenseMatrix to_dense(const LinearOperator& op);

}  // namespace slbfgs
