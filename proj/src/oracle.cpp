// SPDX-License-Identifier: Apache-2.0
#include "slbfgs/oracle.hpp"

#include <stdexcept>

namespace slbfgs {

DenseMatrix dense_bfgs_oracle(const DenseMatrix& seed,
                              const std::vector<UpdatePair>& pairs) {
  if (seed.rows() != seed.cols()) {
    throw std::invalid_argument("dense_bfgs_oracle: seed must be square");
  }
  DenseMatrix B = seed;
  for (const auto& p : pairs) {
    if (p.s.size() != B.rows() || p.y.size() != B.rows()) {
      throw std::invalid_argument("dense_bfgs_oracle: pair dimension mismatch");
    }
    const double ys = p.y.dot(p.s);
    if (!(ys > 0.0)) throw std::invalid_argument("dense_bfgs_oracle: y's <= 0");
    const Vector Bs = B * p.s;
    const double sBs = p.s.dot(Bs);
    if (!(sBs > 0.0)) throw std::domain_error("dense_bfgs_oracle: s'Bs <= 0");
    B += p.y * p.y.transpose() / ys - Bs * Bs.transpose() / sBs;
  }
  return B;
}

}  // namespace slbfgs
