// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "slbfgs/lbfgs_core.hpp"
#include "slbfgs/linalg.hpp"

#include <vector>

namespace slbfgs {

/// Dense reference for the limited-memory update: starting from `seed`,
/// applies B <- B + y y' / (y's) - B s s' B / (s'B s) for each pair in order.
/// For testing only; the optimizer never forms B.
///
/// Throws std::invalid_argument if y's <= 0 for some pair or the sizes
/// disagree, and std::domain_error if s'B s <= 0.
DenseMatrix dense_bfgs_oracle(const DenseMatrix& seed,
                              const std::vector<UpdatePair>& pairs);

}  // namespace slbfgs
